#include "solmz/commands.hpp"

#include "solmz/csv.hpp"
#include "solmz/error.hpp"
#include "solmz/fit.hpp"
#include "solmz/interferometer.hpp"
#include "solmz/variational.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace solmz {

namespace {

const double a0 = constants().a0;
constexpr double two_pi = 2.0 * pi;

std::vector<KeySpec> common_keys() {
    return {
        {"grid.n_points", "4096", "grid points, power of two >= 256"},
        {"grid.extent_um", "800", "full window"},
        {"atoms.species", "rb85", "rb85 or rb87"},
        {"atoms.omega_r_hz", "70", "radial guide frequency"},
        {"atoms.atom_number", "10000", "N"},
        {"run.dt_us", "1", "real-time step"},
    };
}

std::vector<KeySpec> cloud_keys() {
    return {
        {"prep.kind", "ground", "ground (imaginary time in a harmonic trap) or sech"},
        {"prep.omega_z_hz", "3", "axial frequency of the preparation trap"},
        {"prep.a_a0", "5", "scattering length during preparation"},
        {"prep.sech_lz_um", "", "sech width when kind = sech"},
        {"prep.tolerance", "1e-12", "relative energy change per imaginary-time step"},
        {"guide.omega_z_sq_hz2", "-9", "signed (omega_z / 2 pi)^2 of the guide"},
        {"guide.acceleration_m_s2", "0", "uniform acceleration"},
        {"guide.release_offset_um", "0", "release point relative to the potential extremum"},
        {"guide.quartic_j_m4", "0", "quartic coefficient"},
    };
}

std::vector<KeySpec> join(std::vector<KeySpec> a, const std::vector<KeySpec>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::string path_in(const RunContext& ctx, const std::string& name) {
    return (std::filesystem::path(ctx.out_dir) / name).string();
}

void ensure_out_dir(const RunContext& ctx) {
    std::error_code ec;
    std::filesystem::create_directories(ctx.out_dir, ec);
    if (ec) {
        throw DomainError("cannot create output directory " + ctx.out_dir + ": " + ec.message());
    }
}

struct Report {
    std::ostringstream text;
    void put(const std::string& key, double v) { text << key << " = " << format_number(v) << '\n'; }
    void put(const std::string& key, const std::string& v) { text << key << " = " << v << '\n'; }
};

void write_report(CommandResult& r, const RunContext& ctx, const std::string& name) {
    const std::string p = path_in(ctx, name);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DomainError("cannot open " + p + " for writing");
    }
    out << r.report;
    r.files.push_back(p);
}

const Species& species_named(const std::string& label) {
    if (label == "rb85") {
        return rb85();
    }
    if (label == "rb87") {
        return rb87();
    }
    throw ConfigError("atoms.species: unknown species '" + label + "'");
}

double positive(const Scenario& sc, const std::string& key) {
    const double v = sc.number(key);
    if (!(v > 0.0)) {
        throw ConfigError(key + ": must be positive");
    }
    return v;
}

std::size_t count(const Scenario& sc, const std::string& key, long min) {
    const long v = sc.integer(key);
    if (v < min) {
        throw ConfigError(key + ": must be at least " + std::to_string(min));
    }
    return static_cast<std::size_t>(v);
}

void require_increasing(const std::vector<double>& v, const std::string& key, bool strict) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (strict ? !(v[i] > v[i - 1]) : v[i] < v[i - 1]) {
            throw ConfigError(key + ": values must increase");
        }
    }
}

Grid1D grid_from(const Scenario& sc) {
    const long n = sc.integer("grid.n_points");
    if (n < 256 || (n & (n - 1)) != 0) {
        throw ConfigError("grid.n_points: must be a power of two >= 256");
    }
    return make_grid(static_cast<std::size_t>(n), positive(sc, "grid.extent_um") * micron);
}

GuidedAtoms atoms_from(const Scenario& sc) {
    return {species_named(sc.get("atoms.species")).mass,
            two_pi * positive(sc, "atoms.omega_r_hz")};
}

AxialPotential guide_from(const Scenario& sc) {
    AxialPotential v;
    v.omega_z_sq = sc.number("guide.omega_z_sq_hz2") * two_pi * two_pi;
    // a cloud released at z0 from the extremum sees the local force -m w^2 z0
    v.acceleration = sc.number("guide.acceleration_m_s2") -
                     v.omega_z_sq * sc.number("guide.release_offset_um") * micron;
    v.quartic_coeff = sc.number("guide.quartic_j_m4");
    return v;
}

// ---------------------------------------------------------------- feshbach

struct FeshbachParams {
    FeshbachResonance res;
    std::optional<double> field;
    std::optional<double> scattering;
    std::vector<double> curve;
    std::optional<double> curvature;
    int F = 2;
    int mF = -2;
    std::string species;
};

FeshbachParams parse_feshbach(const Scenario& sc) {
    FeshbachParams p;
    p.res = make_resonance(sc.number("resonance.a_bg_a0") * a0,
                           sc.number("resonance.delta_g") * gauss,
                           sc.number("resonance.b0_g") * gauss);
    if (sc.has("feshbach.field_g")) {
        p.field = sc.number("feshbach.field_g") * gauss;
        if (*p.field < 0.0) {
            throw ConfigError("feshbach.field_g: must be non-negative");
        }
    }
    if (sc.has("feshbach.scattering_a0")) {
        p.scattering = sc.number("feshbach.scattering_a0") * a0;
    }
    p.curve = sc.list("feshbach.curve_g");
    if (!p.curve.empty() && p.curve.size() < 2) {
        throw ConfigError("feshbach.curve_g: needs at least two fields");
    }
    if (sc.has("feshbach.curvature_mg_mm2")) {
        p.curvature = sc.number("feshbach.curvature_mg_mm2");
    }
    p.species = sc.get("atoms.species");
    const Species& s = species_named(p.species);
    p.F = static_cast<int>(sc.integer("feshbach.hyperfine_f"));
    p.mF = static_cast<int>(sc.integer("feshbach.m_f"));
    if (std::abs(p.mF) > p.F) {
        throw ConfigError("feshbach.m_f: |m_F| must not exceed F");
    }
    (void)s.g_factor(p.F);
    return p;
}

CommandResult run_feshbach(const FeshbachParams& p, const RunContext& ctx) {
    CommandResult r;
    Report rep;
    constexpr double kPoleWarn = 0.1 * gauss;
    auto near_pole = [&](double B) { return std::abs(B - p.res.B0) < kPoleWarn; };
    if (p.field) {
        if (near_pole(*p.field)) {
            r.warnings.push_back("field " + format_number(*p.field / gauss) +
                                 " G is within 0.1 G of the resonance");
        }
        rep.put("field_g", *p.field / gauss);
        rep.put("scattering_a0", scattering_length(p.res, *p.field) / a0);
    }
    if (p.scattering) {
        const double B = field_for_scattering_length(p.res, *p.scattering);
        rep.put("scattering_a0", *p.scattering / a0);
        rep.put("field_g", B / gauss);
        if (near_pole(B)) {
            r.warnings.push_back("required field lies within 0.1 G of the resonance");
        }
    }
    if (p.curvature) {
        const Species& s = species_named(p.species);
        FieldProfile prof{0.0, *p.curvature * 1e-3 * gauss / (1e-3 * 1e-3), 0.0};
        const double w2 = axial_frequency_squared(prof, s, p.F, p.mF);
        rep.put("curvature_mg_mm2", *p.curvature);
        rep.put("omega_z_sq_rad2_s2", w2);
        rep.put("axial_frequency_hz", std::sqrt(std::abs(w2)) / two_pi);
        rep.put("axial_kind", w2 < 0.0 ? "expulsive" : (w2 > 0.0 ? "confining" : "flat"));
    }
    if (!p.curve.empty()) {
        ensure_out_dir(ctx);
        CsvWriter w(path_in(ctx, "feshbach_curve.csv"), "feshbach_curve", {"B_G", "a_a0"});
        bool warned = false;
        for (double Bg : p.curve) {
            const double B = Bg * gauss;
            if (near_pole(B) && !warned) {
                r.warnings.push_back("curve passes within 0.1 G of the resonance");
                warned = true;
            }
            if (B == p.res.B0) {
                continue;  // the pole itself has no value
            }
            w.row({Bg, scattering_length(p.res, B) / a0});
        }
        w.close();
        r.files.push_back(w.path());
        rep.put("curve_points", static_cast<double>(p.curve.size()));
    }
    r.report = rep.text.str();
    return r;
}

// -------------------------------------------------------------- varsurface

struct VarParams {
    VariationalParams vp;
    double sigma_rho = 0.0;
    Vec2 guess{};
    Vec2 rho_range{};
    Vec2 z_range{};
    std::size_t rho_res = 0, z_res = 0;
};

VarParams parse_varsurface(const Scenario& sc) {
    VarParams p;
    const Species& s = species_named(sc.get("atoms.species"));
    const double omega_r = two_pi * positive(sc, "variational.omega_r_hz");
    p.sigma_rho = harmonic_length(s.mass, omega_r);
    const double alpha = sc.has("variational.alpha")
                             ? sc.number("variational.alpha")
                             : interaction_parameter(positive(sc, "variational.atom_number"),
                                                     sc.number("variational.a_a0") * a0, s.mass,
                                                     omega_r);
    const double lambda_sq =
        sc.has("variational.lambda_sq")
            ? sc.number("variational.lambda_sq")
            : sc.number("variational.omega_z_sq_hz2") / (omega_r / two_pi * omega_r / two_pi);
    p.vp = make_variational_params(alpha, lambda_sq);
    p.guess = {positive(sc, "variational.guess_rho"), positive(sc, "variational.guess_z")};
    const auto rr = sc.list("variational.rho_range");
    const auto zr = sc.list("variational.z_range");
    if (rr.size() != 2 || zr.size() != 2 || !(rr[0] > 0.0) || !(rr[1] > rr[0]) ||
        !(zr[0] > 0.0) || !(zr[1] > zr[0])) {
        throw ConfigError("variational.rho_range/z_range: need two increasing positive bounds");
    }
    p.rho_range = {rr[0], rr[1]};
    p.z_range = {zr[0], zr[1]};
    p.rho_res = count(sc, "variational.rho_res", 2);
    p.z_res = count(sc, "variational.z_res", 2);
    return p;
}

CommandResult run_varsurface(const VarParams& p, const RunContext& ctx) {
    CommandResult r;
    Report rep;
    rep.put("alpha", p.vp.alpha);
    rep.put("lambda_sq", p.vp.lambda_sq);
    const SurfacePoint sp = find_stationary_point(p.vp, p.guess);
    rep.put("gamma_rho", sp.gamma_rho);
    rep.put("gamma_z", sp.gamma_z);
    rep.put("energy", sp.energy);
    rep.put("kind", to_string(sp.kind));
    rep.put("gradient_norm", sp.gradient_norm);
    rep.put("iterations", sp.iterations);
    rep.put("l_z_um", soliton_axial_width(sp, p.sigma_rho) / micron);

    ensure_out_dir(ctx);
    const SurfaceGrid grid = surface_grid(p.vp, p.rho_range, p.z_range, p.rho_res, p.z_res);
    CsvWriter w(path_in(ctx, "surface.csv"), "variational_surface",
                {"gamma_rho", "gamma_z", "epsilon"});
    for (std::size_t i = 0; i < grid.gamma_rho.size(); ++i) {
        for (std::size_t j = 0; j < grid.gamma_z.size(); ++j) {
            w.row({grid.gamma_rho[i], grid.gamma_z[j], grid.at(i, j)});
        }
    }
    w.close();
    r.files.push_back(w.path());
    rep.put("surface_rows", static_cast<double>(p.rho_res * p.z_res));
    r.report = rep.text.str();
    write_report(r, ctx, "stationary.txt");
    return r;
}

// ------------------------------------------------------------ cloud setup

void validate_cloud_keys(const Scenario& sc) {
    const std::string kind = sc.get("prep.kind");
    if (kind != "ground" && kind != "sech") {
        throw ConfigError("prep.kind: expected ground or sech");
    }
    if (kind == "ground") {
        positive(sc, "prep.omega_z_hz");
        positive(sc, "prep.tolerance");
        sc.number("prep.a_a0");
    } else {
        positive(sc, "prep.sech_lz_um");
    }
    guide_from(sc);
    positive(sc, "atoms.atom_number");
    positive(sc, "run.dt_us");
    const Grid1D g = grid_from(sc);
    const GuidedAtoms atoms = atoms_from(sc);
    const double phase = max_kinetic_phase(g, atoms, sc.number("run.dt_us") * 1e-6);
    if (phase >= 0.5) {
        throw ConfigError("run.dt_us: kinetic phase per step " + format_number(phase) +
                          " rad must stay below 0.5");
    }
    if (kind == "sech" && !(sc.number("prep.sech_lz_um") * micron > 4.0 * g.spacing)) {
        throw ConfigError("prep.sech_lz_um: width below 4 grid spacings");
    }
}

} // namespace

PreparedCloud prepare_cloud(const Scenario& sc) {
    validate_cloud_keys(sc);
    PreparedCloud c;
    c.grid = grid_from(sc);
    c.atoms = atoms_from(sc);
    c.guide = guide_from(sc);
    c.dt = sc.number("run.dt_us") * 1e-6;
    const double N = sc.number("atoms.atom_number");
    if (sc.get("prep.kind") == "sech") {
        c.state = sech_state(c.grid, sc.number("prep.sech_lz_um") * micron, 0.0, N);
    } else {
        const double w = two_pi * sc.number("prep.omega_z_hz");
        GroundStateOptions opts;
        opts.tolerance = sc.number("prep.tolerance");
        c.state = ground_state_imaginary_time(c.grid, c.atoms, AxialPotential{w * w, 0.0, 0.0},
                                              sc.number("prep.a_a0") * a0, N, opts)
                      .state;
    }
    return c;
}

std::vector<RfSample> synthetic_rf_samples(const FieldProfile& profile, double g_F, int dmF,
                                           std::span<const double> positions, double noise_T,
                                           std::mt19937_64& rng) {
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<RfSample> out;
    out.reserve(positions.size());
    for (double z : positions) {
        double B = profile.field(z);
        if (noise_T > 0.0) {
            B += noise_T * noise(rng);
        }
        out.push_back({z, rf_transition_frequency(B, g_F, dmF)});
    }
    return out;
}

namespace {

// ------------------------------------------------------------------ expand

struct ExpandParams {
    std::string mode;
    std::vector<double> sample_times;  // s
    std::vector<double> a_list;        // m
    std::pair<double, double> sweep_range{};
    std::size_t sweep_points = 0;
    double hold = 0.0;
    double tolerance = 0.0;
};

ExpandParams parse_expand(const Scenario& sc) {
    validate_cloud_keys(sc);
    ExpandParams p;
    p.mode = sc.get("expand.mode");
    if (p.mode != "both" && p.mode != "series" && p.mode != "sweep") {
        throw ConfigError("expand.mode: expected both, series or sweep");
    }
    if (p.mode != "sweep") {
        for (double t : sc.list("expand.sample_times_ms")) {
            p.sample_times.push_back(t * millisecond);
        }
        if (p.sample_times.empty() || p.sample_times.front() < 0.0) {
            throw ConfigError("expand.sample_times_ms: need non-negative sample times");
        }
        require_increasing(p.sample_times, "expand.sample_times_ms", true);
        for (double a : sc.list("expand.a_list_a0")) {
            p.a_list.push_back(a * a0);
        }
        if (p.a_list.empty() && p.mode == "series") {
            throw ConfigError("expand.a_list_a0: need at least one scattering length");
        }
    }
    if (p.mode != "series") {
        const auto range = sc.list("expand.sweep_range_a0");
        if (range.size() != 2 || !(range[1] > range[0])) {
            throw ConfigError("expand.sweep_range_a0: need two increasing values");
        }
        p.sweep_range = {range[0] * a0, range[1] * a0};
        p.sweep_points = count(sc, "expand.sweep_points", 3);
        p.hold = sc.number("expand.hold_ms") * millisecond;
        if (p.hold < 0.0) {
            throw ConfigError("expand.hold_ms: must be non-negative");
        }
        p.tolerance = sc.number("expand.tolerance_a0") * a0;
        if (p.tolerance < 0.0) {
            throw ConfigError("expand.tolerance_a0: must be non-negative");
        }
    }
    return p;
}

CommandResult run_expand(const ExpandParams& p, const Scenario& sc, const RunContext& ctx) {
    CommandResult r;
    Report rep;
    const PreparedCloud c = prepare_cloud(sc);
    rep.put("initial_width_um", rms_width(c.state, c.grid) / micron);
    ensure_out_dir(ctx);

    // the sweep runs first so that "both" can add a series at the found a_s
    std::vector<double> a_list = p.a_list;
    if (p.mode != "series") {
        SolitonSearchOptions opts;
        opts.coarse_points = p.sweep_points;
        opts.tolerance = p.tolerance;
        opts.dt = c.dt;
        opts.workers = ctx.workers;
        const SolitonSearch s =
            find_soliton_parameter(c.state, c.grid, c.atoms, c.guide, p.sweep_range, p.hold, opts);
        auto scan = s.scan;
        std::stable_sort(scan.begin(), scan.end(),
                         [](const auto& x, const auto& y) { return x.first < y.first; });
        CsvWriter w(path_in(ctx, "sweep.csv"), "width_vs_a", {"a_a0", "width_um"});
        for (const auto& [a, width] : scan) {
            w.row({a / a0, width / micron});
        }
        w.close();
        r.files.push_back(w.path());
        rep.put("a_s_a0", s.a_s / a0);
        rep.put("width_at_a_s_um", s.width / micron);
        rep.put("coarse_step_a0", s.coarse_step / a0);
        rep.put("boundary_warning", s.boundary_warning ? "true" : "false");
        if (s.boundary_warning) {
            r.warnings.push_back("width minimum at the edge of the scattering-length range");
        }
        if (p.mode == "both") {
            a_list.push_back(s.a_s);
        }
    }
    if (p.mode != "sweep") {
        const auto series = parallel_map<std::vector<WidthSample>>(
            a_list.size(), ctx.workers,
            std::function<std::vector<WidthSample>(std::size_t)>([&](std::size_t i) {
                return expansion_series(c.state, c.grid, c.atoms, c.guide, a_list[i],
                                        p.sample_times, c.dt);
            }));
        CsvWriter acc(path_in(ctx, "accelerations.csv"), "width_acceleration",
                      {"a_a0", "width_acceleration_mm_s2", "stderr_mm_s2"});
        for (std::size_t i = 0; i < a_list.size(); ++i) {
            const std::string name = "expansion_" + std::to_string(i) + ".csv";
            CsvWriter w(path_in(ctx, name), "expansion a_a0=" + format_number(a_list[i] / a0),
                        {"t_ms", "width_um"});
            std::vector<double> ts, ws;
            for (const auto& s : series[i]) {
                w.row({s.time / millisecond, s.width / micron});
                ts.push_back(s.time);
                ws.push_back(s.width);
            }
            w.close();
            r.files.push_back(w.path());
            const std::string tag = "series" + std::to_string(i);
            rep.put(tag + ".a_a0", a_list[i] / a0);
            rep.put(tag + ".final_width_um", ws.back() / micron);
            if (ts.size() >= 3) {
                const FitResult f = fit_parabola(ts, ws);
                const double acc_v = f.value("width_acceleration") * 1e3;
                const double acc_e = f.error("width_acceleration") * 1e3;
                acc.row({a_list[i] / a0, acc_v, acc_e});
                rep.put(tag + ".width_acceleration_mm_s2", acc_v);
                rep.put(tag + ".width_acceleration_err_mm_s2", acc_e);
            }
        }
        acc.close();
        r.files.push_back(acc.path());
    }
    r.report = rep.text.str();
    write_report(r, ctx, "expand_report.txt");
    return r;
}

// ---------------------------------------------------------------------- mz

struct MzParams {
    std::string mode;
    double T = 0.0;
    double a = 0.0;
    std::vector<double> T_list;
    std::vector<double> a_list;
    std::size_t phases = 0;
    double buffer = 0.0;
    double cross = 2.0;
    double rabi = 0.0;  // rad/s, 0 => instantaneous
    double k = 0.0;
};

MzParams parse_mz(const Scenario& sc) {
    validate_cloud_keys(sc);
    MzParams p;
    p.mode = sc.get("mz.mode");
    if (p.mode != "scan" && p.mode != "a_sweep" && p.mode != "t_sweep") {
        throw ConfigError("mz.mode: expected scan, a_sweep or t_sweep");
    }
    p.T = positive(sc, "mz.T_ms") * millisecond;
    p.a = sc.number("mz.a_a0") * a0;
    p.phases = count(sc, "mz.phases", 4);
    p.buffer = sc.number("mz.buffer_ms") * millisecond;
    if (p.buffer < 0.0) {
        throw ConfigError("mz.buffer_ms: must be non-negative");
    }
    p.cross = sc.number("mz.cross_coupling");
    p.rabi = sc.number("mz.rabi_khz") * two_pi * 1e3;
    if (p.rabi < 0.0) {
        throw ConfigError("mz.rabi_khz: must be non-negative");
    }
    p.k = two_pi / (positive(sc, "mz.lattice_nm") * 1e-9);
    if (p.mode == "t_sweep") {
        for (double t : sc.list("mz.T_list_ms")) {
            if (!(t > 0.0)) {
                throw ConfigError("mz.T_list_ms: interpulse times must be positive");
            }
            p.T_list.push_back(t * millisecond);
        }
        if (p.T_list.empty()) {
            throw ConfigError("mz.T_list_ms: need at least one T");
        }
        require_increasing(p.T_list, "mz.T_list_ms", true);
    }
    if (p.mode != "scan") {
        for (double a : sc.list("mz.a_list_a0")) {
            p.a_list.push_back(a * a0);
        }
    }
    if (p.mode == "t_sweep" && p.a_list.empty()) {
        p.a_list.push_back(p.a);
    }
    if (p.mode == "a_sweep") {
        if (p.a_list.empty()) {
            throw ConfigError("mz.a_list_a0: need at least one scattering length");
        }
        require_increasing(p.a_list, "mz.a_list_a0", true);
    }
    return p;
}

MZSequence sequence_for(const MzParams& p, const PreparedCloud& c, double T, double a) {
    MZSequence seq;
    seq.T = T;
    seq.scattering_length = a;
    seq.buffer = p.buffer;
    seq.potential = c.guide;
    seq.cross_coupling = p.cross;
    seq.k_lattice = p.k;
    seq.dt = c.dt;
    if (p.rabi > 0.0) {
        seq.pulses = {PulseSpec::finite(PulseKind::half_pi, 0.0, p.rabi),
                      PulseSpec::finite(PulseKind::pi, 0.0, p.rabi),
                      PulseSpec::finite(PulseKind::half_pi, 0.0, p.rabi)};
    }
    validate(seq);
    return seq;
}

CommandResult run_mz(const MzParams& p, const Scenario& sc, const RunContext& ctx) {
    CommandResult r;
    Report rep;
    const PreparedCloud c = prepare_cloud(sc);
    std::vector<std::pair<double, double>> points;  // (T, a)
    if (p.mode == "scan") {
        points.emplace_back(p.T, p.a);
    } else if (p.mode == "a_sweep") {
        for (double a : p.a_list) {
            points.emplace_back(p.T, a);
        }
    } else {
        for (double a : p.a_list) {
            for (double T : p.T_list) {
                points.emplace_back(T, a);
            }
        }
    }
    std::vector<double> phases(p.phases);
    for (std::size_t i = 0; i < p.phases; ++i) {
        phases[i] = two_pi * static_cast<double>(i) / static_cast<double>(p.phases);
    }
    // validate every sequence before the first compute
    for (const auto& [T, a] : points) {
        sequence_for(p, c, T, a);
    }
    const auto scans = parallel_map<std::vector<FringePoint>>(
        points.size(), ctx.workers,
        std::function<std::vector<FringePoint>(std::size_t)>([&](std::size_t i) {
            return fringe_scan(sequence_for(p, c, points[i].first, points[i].second), phases,
                               c.grid, c.atoms, c.state);
        }));

    ensure_out_dir(ctx);
    CsvWriter vis(path_in(ctx, "visibility.csv"), "visibility",
                  {"T_ms", "a_a0", "V", "V_err", "Phi_rad", "Phi_err_rad", "c"});
    std::vector<double> Ts, Vs, Phis;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::string name = "fringe_" + std::to_string(i) + ".csv";
        CsvWriter w(path_in(ctx, name), "fringe T_ms=" + format_number(points[i].first / millisecond) +
                                            " a_a0=" + format_number(points[i].second / a0),
                    {"phase_rad", "N_rel"});
        std::vector<double> ph, nr;
        for (const auto& f : scans[i]) {
            w.row({f.phase, f.n_rel});
            ph.push_back(f.phase);
            nr.push_back(f.n_rel);
        }
        w.close();
        r.files.push_back(w.path());
        const FitResult fr = fit_fringe(ph, nr);
        vis.row({points[i].first / millisecond, points[i].second / a0, fr.value("V"), fr.error("V"),
                 fr.value("Phi"), fr.error("Phi"), fr.value("c")});
        Ts.push_back(points[i].first);
        Vs.push_back(fr.value("V"));
        Phis.push_back(fr.value("Phi"));
        const std::string tag = "point" + std::to_string(i);
        rep.put(tag + ".T_ms", points[i].first / millisecond);
        rep.put(tag + ".a_a0", points[i].second / a0);
        rep.put(tag + ".V", fr.value("V"));
        rep.put(tag + ".Phi_rad", fr.value("Phi"));
    }
    vis.close();
    r.files.push_back(vis.path());
    if (p.mode == "a_sweep") {
        const auto best = static_cast<std::size_t>(std::max_element(Vs.begin(), Vs.end()) - Vs.begin());
        rep.put("argmax_a_a0", points[best].second / a0);
        rep.put("max_V", Vs[best]);
    }
    if (p.mode == "t_sweep") {
        const std::size_t nT = p.T_list.size();
        for (std::size_t j = 0; j < p.a_list.size(); ++j) {
            const std::string tag = "a" + std::to_string(j);
            const std::vector<double> T(Ts.begin() + j * nT, Ts.begin() + (j + 1) * nT);
            const std::vector<double> V(Vs.begin() + j * nT, Vs.begin() + (j + 1) * nT);
            const std::vector<double> P(Phis.begin() + j * nT, Phis.begin() + (j + 1) * nT);
            rep.put(tag + ".a_a0", p.a_list[j] / a0);
            if (nT >= 3) {
                try {
                    const FitResult g = fit_gaussian_decay(T, V);
                    rep.put(tag + ".decay.V0", g.value("V0"));
                    rep.put(tag + ".decay.tau_half_ms", g.value("tau_half") / millisecond);
                    rep.put(tag + ".decay.tau_half_err_ms", g.error("tau_half") / millisecond);
                } catch (const FitError& e) {
                    r.warnings.push_back(tag + ": Gaussian decay fit failed: " + e.what());
                }
            }
            try {
                const FitResult q = fit_quadratic_phase(T, P, p.k);
                rep.put(tag + ".phase.acceleration_m_s2", q.value("acceleration"));
                rep.put(tag + ".phase.acceleration_err_m_s2", q.error("acceleration"));
            } catch (const Error& e) {
                r.warnings.push_back(tag + ": quadratic phase fit failed: " + e.what());
            }
        }
        rep.put("configured_acceleration_m_s2", c.guide.acceleration);
    }
    r.report = rep.text.str();
    write_report(r, ctx, "mz_report.txt");
    return r;
}

// ---------------------------------------------------------------- fieldmap

struct FieldmapParams {
    std::string input;
    bool synthetic = false;
    double g_F = 0.0;
    int dmF = 1;
    FieldProfile truth;
    double noise = 0.0;
    std::size_t samples = 0;
    double span = 0.0;
};

FieldmapParams parse_fieldmap(const Scenario& sc) {
    FieldmapParams p;
    p.input = sc.get("fieldmap.input");
    p.synthetic = sc.flag("fieldmap.synthetic");
    if (p.synthetic == !p.input.empty()) {
        throw ConfigError("fieldmap: give exactly one of input or synthetic = true");
    }
    p.g_F = sc.number("fieldmap.g_f");
    if (p.g_F == 0.0) {
        throw ConfigError("fieldmap.g_f: must be nonzero");
    }
    p.dmF = static_cast<int>(sc.integer("fieldmap.dmf"));
    if (p.dmF == 0) {
        throw ConfigError("fieldmap.dmf: must be nonzero");
    }
    if (p.synthetic) {
        p.truth.B_center = positive(sc, "fieldmap.b_center_g") * gauss;
        p.truth.curvature = sc.number("fieldmap.curvature_mg_mm2") * 1e-3 * gauss / 1e-6;
        p.truth.z_offset = sc.number("fieldmap.z_offset_mm") * 1e-3;
        p.noise = sc.number("fieldmap.noise_mg") * 1e-3 * gauss;
        if (p.noise < 0.0) {
            throw ConfigError("fieldmap.noise_mg: must be non-negative");
        }
        p.samples = count(sc, "fieldmap.samples", 3);
        p.span = positive(sc, "fieldmap.span_mm") * 1e-3;
    }
    return p;
}

CommandResult run_fieldmap(const FieldmapParams& p, const RunContext& ctx) {
    CommandResult r;
    Report rep;
    ensure_out_dir(ctx);
    std::vector<RfSample> samples;
    if (p.synthetic) {
        std::mt19937_64 rng(ctx.seed);
        std::vector<double> zs(p.samples);
        for (std::size_t i = 0; i < p.samples; ++i) {
            zs[i] = -p.span + 2.0 * p.span * static_cast<double>(i) / static_cast<double>(p.samples - 1);
        }
        samples = synthetic_rf_samples(p.truth, p.g_F, p.dmF, zs, p.noise, rng);
        CsvWriter w(path_in(ctx, "rf_samples.csv"), "rf_samples", {"position_mm", "frequency_MHz"});
        for (const auto& s : samples) {
            w.row({s.position * 1e3, s.frequency * 1e-6});
        }
        w.close();
        r.files.push_back(w.path());
    } else {
        const CsvTable t = read_csv(p.input, 2);
        for (const auto& row : t.rows) {
            samples.push_back({row[0] * 1e-3, row[1] * 1e6});
        }
    }
    const FieldMap m = field_map_from_rf(samples, p.g_F, p.dmF);
    const double to_mg_mm2 = 1e-6 / (1e-3 * gauss);
    rep.put("samples", static_cast<double>(samples.size()));
    rep.put("B_center_g", m.profile.B_center / gauss);
    rep.put("B_center_err_mg", m.B_center_stderr / (1e-3 * gauss));
    rep.put("curvature_mg_mm2", m.profile.curvature * to_mg_mm2);
    rep.put("curvature_err_mg_mm2", m.curvature_stderr * to_mg_mm2);
    rep.put("z_offset_mm", m.profile.z_offset * 1e3);
    CsvWriter w(path_in(ctx, "fieldmap_residuals.csv"), "fieldmap_residuals",
                {"position_mm", "residual_mG"});
    for (std::size_t i = 0; i < samples.size(); ++i) {
        w.row({samples[i].position * 1e3, m.residuals[i] / (1e-3 * gauss)});
    }
    w.close();
    r.files.push_back(w.path());
    r.report = rep.text.str();
    write_report(r, ctx, "fieldmap_report.txt");
    return r;
}

// --------------------------------------------------------------------- fit

struct FitParams {
    std::string model;
    std::string input;
    double k = 0.0;
};

FitParams parse_fit(const Scenario& sc) {
    FitParams p;
    p.model = sc.get("fit.model");
    if (p.model != "parabola" && p.model != "fringe" && p.model != "gaussian_decay" &&
        p.model != "quadratic_phase") {
        throw ConfigError("fit.model: expected parabola, fringe, gaussian_decay or quadratic_phase");
    }
    p.input = sc.get("fit.input");
    if (p.input.empty()) {
        throw ConfigError("fit.input: a two-column CSV is required");
    }
    p.k = positive(sc, "fit.k_per_m");
    return p;
}

CommandResult run_fit(const FitParams& p, const RunContext& ctx) {
    CommandResult r;
    Report rep;
    const CsvTable t = read_csv(p.input, 2);
    const auto xs = t.column(0);
    const auto ys = t.column(1);
    FitResult f;
    std::function<double(double)> model;
    if (p.model == "parabola") {
        f = fit_parabola(xs, ys);
        model = [&](double x) { return f.value("c0") + x * (f.value("c1") + x * f.value("c2")); };
    } else if (p.model == "fringe") {
        f = fit_fringe(xs, ys);
        model = [&](double x) { return 0.5 * f.value("V") * std::cos(x + f.value("Phi")) + f.value("c"); };
    } else if (p.model == "gaussian_decay") {
        f = fit_gaussian_decay(xs, ys);
        model = [&](double x) {
            const double u = x / f.value("tau_g");
            return f.value("V0") * std::exp(-u * u);
        };
    } else {
        f = fit_quadratic_phase(xs, ys, p.k);
        model = [&](double x) { return wrap_phase(analytic_phase(p.k, f.value("acceleration"), x)); };
    }
    rep.put("model", p.model);
    for (std::size_t i = 0; i < f.parameters.size(); ++i) {
        rep.put(f.parameters[i].first, f.parameters[i].second);
        rep.put(f.parameters[i].first + "_err", f.standard_errors[i]);
    }
    rep.put("residual_norm", f.residual_norm);
    rep.put("converged", f.converged ? "true" : "false");
    ensure_out_dir(ctx);
    CsvWriter w(path_in(ctx, "fit_residuals.csv"), "fit_residuals " + p.model,
                {"x", "y", "model", "residual"});
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double m = model(xs[i]);
        double res = ys[i] - m;
        if (p.model == "quadratic_phase") {
            res = wrap_phase(res);
        }
        w.row({xs[i], ys[i], m, res});
    }
    w.close();
    r.files.push_back(w.path());
    r.report = rep.text.str();
    write_report(r, ctx, "fit_report.txt");
    return r;
}

} // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"feshbach", "varsurface", "expand",
                                                "mz",       "fieldmap",   "fit"};
    return names;
}

std::vector<KeySpec> command_schema(const std::string& command) {
    if (command == "feshbach") {
        return {
            {"atoms.species", "rb85", "rb85 or rb87"},
            {"resonance.a_bg_a0", "-443", "background scattering length"},
            {"resonance.delta_g", "10.71", "resonance width"},
            {"resonance.b0_g", "155.041", "resonance centre"},
            {"feshbach.field_g", "", "field to convert to a scattering length"},
            {"feshbach.scattering_a0", "", "scattering length to convert to a field"},
            {"feshbach.curve_g", "", "lo:hi:step field curve written as CSV"},
            {"feshbach.curvature_mg_mm2", "", "field curvature for the axial frequency"},
            {"feshbach.hyperfine_f", "2", "F of the guided state"},
            {"feshbach.m_f", "-2", "m_F of the guided state"},
        };
    }
    if (command == "varsurface") {
        return {
            {"atoms.species", "rb85", "rb85 or rb87"},
            {"variational.alpha", "", "interaction parameter; derived from N, a, omega_r if empty"},
            {"variational.lambda_sq", "", "signed aspect ratio squared; derived if empty"},
            {"variational.atom_number", "15000", "N"},
            {"variational.a_a0", "-30", "scattering length"},
            {"variational.omega_r_hz", "70", "radial frequency"},
            {"variational.omega_z_sq_hz2", "-1", "signed (omega_z / 2 pi)^2"},
            {"variational.guess_rho", "1", "Newton start, radial"},
            {"variational.guess_z", "30", "Newton start, axial"},
            {"variational.rho_range", "0.5, 1.5", "surface grid bounds"},
            {"variational.z_range", "5, 100", "surface grid bounds"},
            {"variational.rho_res", "101", "surface rows"},
            {"variational.z_res", "101", "surface columns"},
        };
    }
    if (command == "expand") {
        return join(join(common_keys(), cloud_keys()),
                    {
                        {"expand.mode", "both", "both, series or sweep"},
                        {"expand.sample_times_ms", "0:90:5", "width samples"},
                        {"expand.a_list_a0", "5, 0.5", "series scattering lengths; mode both adds a_s"},
                        {"expand.sweep_range_a0", "-6, 2", "scan bounds for the soliton search"},
                        {"expand.sweep_points", "9", "coarse scan points"},
                        {"expand.hold_ms", "90", "hold before measuring the width"},
                        {"expand.tolerance_a0", "0", "final bracket; 0 means coarse step / 64"},
                    });
    }
    if (command == "mz") {
        return join(join(common_keys(), cloud_keys()),
                    {
                        {"mz.mode", "scan", "scan, a_sweep or t_sweep"},
                        {"mz.T_ms", "1", "interpulse time"},
                        {"mz.a_a0", "0", "scattering length during the sequence"},
                        {"mz.T_list_ms", "0.5, 1, 2", "interpulse times for t_sweep"},
                        {"mz.a_list_a0", "", "scattering lengths for a_sweep, or several curves for t_sweep"},
                        {"mz.phases", "8", "final-pulse phases over one period"},
                        {"mz.buffer_ms", "0.4", "scattering-length buffer before and after"},
                        {"mz.cross_coupling", "2", "cross mean-field factor between classes"},
                        {"mz.rabi_khz", "0", "Bragg Rabi frequency / 2 pi; 0 means instantaneous"},
                        {"mz.lattice_nm", "780", "Bragg wavelength"},
                    });
    }
    if (command == "fieldmap") {
        return {
            {"fieldmap.input", "", "CSV of position_mm, frequency_MHz"},
            {"fieldmap.synthetic", "false", "generate samples instead of reading input"},
            {"fieldmap.g_f", "-0.5", "Lande factor of the probed level"},
            {"fieldmap.dmf", "1", "Delta m_F of the r.f. transition"},
            {"fieldmap.b_center_g", "165.776", "synthetic profile centre field"},
            {"fieldmap.curvature_mg_mm2", "-103", "synthetic profile curvature"},
            {"fieldmap.z_offset_mm", "0", "synthetic profile vertex"},
            {"fieldmap.noise_mg", "0.5", "synthetic Gaussian field noise"},
            {"fieldmap.samples", "40", "synthetic sample count"},
            {"fieldmap.span_mm", "2", "synthetic positions cover -span..span"},
        };
    }
    if (command == "fit") {
        return {
            {"fit.model", "parabola", "parabola, fringe, gaussian_decay or quadratic_phase"},
            {"fit.input", "", "two-column CSV with header"},
            {"fit.k_per_m", format_number(default_lattice_wavenumber()), "k for quadratic_phase"},
        };
    }
    throw ConfigError("unknown command '" + command + "'");
}

Scenario make_scenario(const std::string& command) { return Scenario(command_schema(command)); }

void validate_command(const std::string& command, const Scenario& sc) {
    if (command == "feshbach") {
        parse_feshbach(sc);
    } else if (command == "varsurface") {
        parse_varsurface(sc);
    } else if (command == "expand") {
        parse_expand(sc);
    } else if (command == "mz") {
        parse_mz(sc);
    } else if (command == "fieldmap") {
        parse_fieldmap(sc);
    } else if (command == "fit") {
        parse_fit(sc);
    } else {
        throw ConfigError("unknown command '" + command + "'");
    }
}

CommandResult run_command(const std::string& command, const Scenario& sc, const RunContext& ctx) {
    if (ctx.workers == 0) {
        throw ConfigError("workers must be at least 1");
    }
    if (command == "feshbach") {
        return run_feshbach(parse_feshbach(sc), ctx);
    }
    if (command == "varsurface") {
        return run_varsurface(parse_varsurface(sc), ctx);
    }
    if (command == "expand") {
        return run_expand(parse_expand(sc), sc, ctx);
    }
    if (command == "mz") {
        return run_mz(parse_mz(sc), sc, ctx);
    }
    if (command == "fieldmap") {
        return run_fieldmap(parse_fieldmap(sc), ctx);
    }
    if (command == "fit") {
        return run_fit(parse_fit(sc), ctx);
    }
    throw ConfigError("unknown command '" + command + "'");
}

} // namespace solmz

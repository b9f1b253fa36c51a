#include "solmz/gpe.hpp"

#include "solmz/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace solmz {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_state(const WaveState& s, const Grid1D& g) {
    if (s.amplitudes.size() != g.n_points) {
        throw DomainError("state size " + std::to_string(s.amplitudes.size()) +
                          " does not match grid size " + std::to_string(g.n_points));
    }
}

struct Moments {
    double z = 0.0;
    double var_z = 0.0;
    double p = 0.0;
    double var_p = 0.0;
    double cov_zp = 0.0;  // symmetrised <zp + pz>/2 - <z><p>
};

Moments moments(const WaveState& s, const Grid1D& g, double hbar) {
    const std::size_t n = g.n_points;
    Moments m;
    double z1 = 0.0, z2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = std::norm(s.amplitudes[j]) * g.spacing;
        z1 += rho * g.z[j];
        z2 += rho * g.z[j] * g.z[j];
    }
    m.z = z1;
    m.var_z = std::max(z2 - z1 * z1, 0.0);

    CVec spec = s.amplitudes;
    Fft fft(n);
    fft.forward(spec);
    double p1 = 0.0, p2 = 0.0, total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double w = std::norm(spec[j]);
        total += w;
        p1 += w * g.wavenumbers[j];
        p2 += w * g.wavenumbers[j] * g.wavenumbers[j];
    }
    p1 /= total;
    p2 /= total;
    m.p = hbar * p1;
    m.var_p = std::max(hbar * hbar * (p2 - p1 * p1), 0.0);

    // derivative spectrally, then <z p>_sym = hbar Int z Im(psi* psi') dz
    for (std::size_t j = 0; j < n; ++j) {
        spec[j] *= cplx(0.0, g.wavenumbers[j]) / static_cast<double>(n);
    }
    fft.backward(spec);
    double zp = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        zp += g.z[j] * std::imag(std::conj(s.amplitudes[j]) * spec[j]) * g.spacing;
    }
    m.cov_zp = hbar * zp - m.z * m.p;
    return m;
}

// Position row of the phase-space map of the quadratic Hamiltonian:
// z(t) = A z0 + B p0 + drift.
struct LinearMap {
    double A, B;
};

LinearMap linear_map(double omega_sq, double mass, double t) {
    if (omega_sq > 0.0) {
        const double w = std::sqrt(omega_sq);
        return {std::cos(w * t), std::sin(w * t) / (mass * w)};
    }
    if (omega_sq < 0.0) {
        const double k = std::sqrt(-omega_sq);
        return {std::cosh(k * t), std::sinh(k * t) / (mass * k)};
    }
    return {1.0, t / mass};
}

} // namespace

double Grid1D::k_max() const { return pi / spacing; }

Grid1D make_grid(std::size_t n_points, double extent) {
    if (n_points < 256 || !is_power_of_two(n_points)) {
        throw DomainError("grid size must be a power of two >= 256");
    }
    if (!(extent > 0.0) || !std::isfinite(extent)) {
        throw DomainError("grid extent must be positive");
    }
    Grid1D g;
    g.n_points = n_points;
    g.extent = extent;
    g.spacing = extent / static_cast<double>(n_points);
    g.z.resize(n_points);
    g.wavenumbers.resize(n_points);
    const double dk = 2.0 * pi / extent;
    const auto half = static_cast<std::ptrdiff_t>(n_points / 2);
    for (std::size_t j = 0; j < n_points; ++j) {
        const auto sj = static_cast<std::ptrdiff_t>(j);
        g.z[j] = static_cast<double>(sj - half) * g.spacing;
        g.wavenumbers[j] = dk * static_cast<double>(sj < half ? sj : sj - 2 * half);
    }
    return g;
}

Grid1D default_grid() { return make_grid(4096, 800.0 * micron); }

GuidedAtoms default_atoms() { return {rb85().mass, 2.0 * pi * 70.0}; }

ScatteringSchedule::ScatteringSchedule(std::vector<std::pair<double, double>> steps)
    : steps_(std::move(steps)) {
    if (steps_.empty()) {
        throw DomainError("scattering schedule needs at least one entry");
    }
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        if (!std::isfinite(steps_[i].first) || !std::isfinite(steps_[i].second)) {
            throw DomainError("scattering schedule entries must be finite");
        }
        if (i > 0 && !(steps_[i].first > steps_[i - 1].first)) {
            throw DomainError("scattering schedule times must increase strictly");
        }
    }
}

ScatteringSchedule ScatteringSchedule::constant(double a) {
    return ScatteringSchedule({{-std::numeric_limits<double>::max(), a}});
}

double ScatteringSchedule::at(double t) const {
    if (steps_.empty()) {
        return 0.0;
    }
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                               [](double v, const auto& s) { return v < s.first; });
    if (it == steps_.begin()) {
        return steps_.front().second;
    }
    return std::prev(it)->second;
}

double coupling_1d(double a, double omega_r) {
    if (!(omega_r > 0.0)) {
        throw DomainError("omega_r must be positive");
    }
    return 2.0 * constants().hbar * omega_r * a;
}

double norm(const WaveState& s, const Grid1D& g) {
    double sum = 0.0;
    for (const auto& c : s.amplitudes) {
        sum += std::norm(c);
    }
    return sum * g.spacing;
}

void normalize(WaveState& s, const Grid1D& g) {
    const double n = norm(s, g);
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw DomainError("cannot normalise an empty or non-finite state");
    }
    const double f = 1.0 / std::sqrt(n);
    for (auto& c : s.amplitudes) {
        c *= f;
    }
}

double centre_of_mass(const WaveState& s, const Grid1D& g) {
    require_state(s, g);
    double z1 = 0.0, total = 0.0;
    for (std::size_t j = 0; j < g.n_points; ++j) {
        const double rho = std::norm(s.amplitudes[j]);
        total += rho;
        z1 += rho * g.z[j];
    }
    return z1 / total;
}

double rms_width(const WaveState& s, const Grid1D& g) {
    require_state(s, g);
    double z1 = 0.0, z2 = 0.0, total = 0.0;
    for (std::size_t j = 0; j < g.n_points; ++j) {
        const double rho = std::norm(s.amplitudes[j]);
        total += rho;
        z1 += rho * g.z[j];
        z2 += rho * g.z[j] * g.z[j];
    }
    z1 /= total;
    z2 /= total;
    return std::sqrt(std::max(z2 - z1 * z1, 0.0));
}

double peak_density(const WaveState& s) {
    double peak = 0.0;
    for (const auto& c : s.amplitudes) {
        peak = std::max(peak, std::norm(c));
    }
    return peak;
}

double energy(const WaveState& s, const Grid1D& g, const GuidedAtoms& atoms,
              const AxialPotential& v, double a) {
    require_state(s, g);
    const double hbar = constants().hbar;
    const std::size_t n = g.n_points;
    CVec spec = s.amplitudes;
    Fft(n).forward(spec);
    double kin = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        kin += g.wavenumbers[j] * g.wavenumbers[j] * std::norm(spec[j]);
    }
    // Parseval: sum |psi_j|^2 dz = sum |psi_k|^2 dz / n
    kin *= hbar * hbar / (2.0 * atoms.mass) * g.spacing / static_cast<double>(n);
    const double gN = coupling_1d(a, atoms.omega_r) * s.atom_number;
    double pot = 0.0, inter = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double rho = std::norm(s.amplitudes[j]);
        pot += v(atoms.mass, g.z[j]) * rho;
        inter += 0.5 * gN * rho * rho;
    }
    return kin + (pot + inter) * g.spacing;
}

WaveState sech_state(const Grid1D& g, double l_z, double centre, double atom_number) {
    if (!(l_z > 4.0 * g.spacing)) {
        throw ResolutionError("sech width must exceed 4 grid spacings");
    }
    const double half = 0.5 * g.extent;
    if (std::min(half - centre, centre + half) < 28.0 * l_z) {
        throw ResolutionError("sech profile does not decay inside the window");
    }
    WaveState s;
    s.atom_number = atom_number;
    s.amplitudes.resize(g.n_points);
    for (std::size_t j = 0; j < g.n_points; ++j) {
        s.amplitudes[j] = 1.0 / std::cosh((g.z[j] - centre) / l_z);
    }
    normalize(s, g);
    return s;
}

WaveState gaussian_state(const Grid1D& g, double sigma, double centre, double atom_number) {
    if (!(sigma > 2.0 * g.spacing)) {
        throw ResolutionError("Gaussian width must exceed 2 grid spacings");
    }
    WaveState s;
    s.atom_number = atom_number;
    s.amplitudes.resize(g.n_points);
    for (std::size_t j = 0; j < g.n_points; ++j) {
        const double u = (g.z[j] - centre) / sigma;
        // density std sigma => amplitude exp(-u^2/4)
        s.amplitudes[j] = std::exp(-0.25 * u * u);
    }
    normalize(s, g);
    return s;
}

GroundState ground_state_imaginary_time(const Grid1D& g, const GuidedAtoms& atoms,
                                        const AxialPotential& v, double a, double atom_number,
                                        const GroundStateOptions& opts) {
    if (!(v.omega_z_sq > 0.0)) {
        throw DomainError("no ground state exists in a non-confining axial potential");
    }
    if (!(opts.tolerance > 0.0) || !(opts.final_step > 0.0)) {
        throw DomainError("ground-state tolerance and step must be positive");
    }
    const double hbar = constants().hbar;
    const double omega = std::sqrt(v.omega_z_sq);
    const double osc = std::sqrt(hbar / (2.0 * atoms.mass * omega));
    const double z_eq = v.acceleration / v.omega_z_sq;

    GroundState out;
    out.state = gaussian_state(g, std::max(osc, 3.0 * g.spacing), z_eq, atom_number);
    WaveState& s = out.state;
    const std::size_t n = g.n_points;
    const Fft fft(n);
    const double gN = coupling_1d(a, atoms.omega_r) * atom_number;

    // stage steps: factor-4 ladder ending exactly at final_step
    std::vector<double> stages;
    double dt = opts.final_step;
    const double dt_cap = std::min(1e-4, 0.01 / omega);
    while (dt * 4.0 <= dt_cap) {
        dt *= 4.0;
    }
    for (; dt > opts.final_step * 1.000001; dt /= 4.0) {
        stages.push_back(dt);
    }
    stages.push_back(opts.final_step);

    std::vector<double> vz(n);
    for (std::size_t j = 0; j < n; ++j) {
        vz[j] = v(atoms.mass, g.z[j]);
    }
    std::vector<double> kin_half(n);
    constexpr std::size_t kCheckEvery = 20;
    for (std::size_t st = 0; st < stages.size(); ++st) {
        const double h = stages[st];
        const bool last = st + 1 == stages.size();
        const double tol = last ? opts.tolerance : std::max(opts.tolerance, 1e-10);
        for (std::size_t j = 0; j < n; ++j) {
            const double k = g.wavenumbers[j];
            kin_half[j] = std::exp(-hbar * k * k / (2.0 * atoms.mass) * 0.5 * h) /
                          static_cast<double>(n);
        }
        double e_prev = energy(s, g, atoms, v, a);
        out.energy_trace.push_back(e_prev);
        for (std::size_t step = 1; step <= opts.max_steps_per_stage; ++step) {
            fft.forward(s.amplitudes);
            for (std::size_t j = 0; j < n; ++j) {
                s.amplitudes[j] *= kin_half[j];
            }
            fft.backward(s.amplitudes);
            for (std::size_t j = 0; j < n; ++j) {
                const double rho = std::norm(s.amplitudes[j]);
                s.amplitudes[j] *= std::exp(-(vz[j] + gN * rho) * h / hbar);
            }
            fft.forward(s.amplitudes);
            for (std::size_t j = 0; j < n; ++j) {
                s.amplitudes[j] *= kin_half[j];
            }
            fft.backward(s.amplitudes);
            normalize(s, g);
            if (step % kCheckEvery == 0) {
                const double e = energy(s, g, atoms, v, a);
                out.energy_trace.push_back(e);
                const double per_step = std::abs(e - e_prev) / kCheckEvery;
                e_prev = e;
                if (per_step <= tol * std::abs(e)) {
                    break;
                }
            }
        }
    }
    s.time = 0.0;
    return out;
}

double max_kinetic_phase(const Grid1D& g, const GuidedAtoms& atoms, double dt) {
    const double k = g.k_max();
    return constants().hbar * k * k / (2.0 * atoms.mass) * dt;
}

double predicted_max_width(const WaveState& s, const Grid1D& g, const GuidedAtoms& atoms,
                           const AxialPotential& v, double a_max, double duration) {
    require_state(s, g);
    const double hbar = constants().hbar;
    Moments m = moments(s, g, hbar);
    if (a_max > 0.0) {
        const double gN = coupling_1d(a_max, atoms.omega_r) * s.atom_number;
        double e_int = 0.0;
        for (const auto& c : s.amplitudes) {
            const double rho = std::norm(c);
            e_int += 0.5 * gN * rho * rho * g.spacing;
        }
        m.var_p += 2.0 * atoms.mass * e_int;
    }
    double worst = std::sqrt(m.var_z);
    constexpr int kSamples = 256;
    for (int i = 1; i <= kSamples; ++i) {
        const double t = duration * i / kSamples;
        const LinearMap L = linear_map(v.omega_z_sq, atoms.mass, t);
        const double var = L.A * L.A * m.var_z + 2.0 * L.A * L.B * m.cov_zp + L.B * L.B * m.var_p;
        worst = std::max(worst, std::sqrt(std::max(var, 0.0)));
    }
    return worst;
}

void check_window(const WaveState& s, const Grid1D& g, const GuidedAtoms& atoms,
                  const AxialPotential& v, double a_max, double duration,
                  double momentum_kick) {
    const double hbar = constants().hbar;
    const double width = predicted_max_width(s, g, atoms, v, a_max, duration);
    if (g.extent < 6.0 * width) {
        throw DomainError("window of " + std::to_string(g.extent / micron) +
                          " um is below 6x the predicted width " +
                          std::to_string(width / micron) + " um");
    }
    Moments m = moments(s, g, hbar);
    m.p += momentum_kick;
    constexpr int kSamples = 256;
    for (int i = 0; i <= kSamples; ++i) {
        const double t = duration * i / kSamples;
        const LinearMap L = linear_map(v.omega_z_sq, atoms.mass, t);
        double z;
        if (v.omega_z_sq != 0.0) {
            const double z_eq = v.acceleration / v.omega_z_sq;
            z = z_eq + L.A * (m.z - z_eq) + L.B * m.p;
        } else {
            z = m.z + m.p / atoms.mass * t + 0.5 * v.acceleration * t * t;
        }
        if (std::abs(z) + 3.0 * width > 0.5 * g.extent) {
            throw DomainError("cloud centre reaches " + std::to_string(z / micron) +
                              " um, too close to the window edge");
        }
    }
}

WaveState evolve(WaveState state, const Grid1D& g, const GuidedAtoms& atoms,
                 const AxialPotential& v, const ScatteringSchedule& schedule, double duration,
                 double dt, const EvolveOptions& opts) {
    require_state(state, g);
    if (!(dt > 0.0)) {
        throw DomainError("time step must be positive");
    }
    if (!(duration >= 0.0)) {
        throw DomainError("duration must be non-negative");
    }
    if (duration == 0.0) {
        return state;
    }
    const double hbar = constants().hbar;
    const std::size_t n = g.n_points;
    const auto steps = static_cast<std::size_t>(std::ceil(duration / dt * (1.0 - 1e-12)));
    const double h = duration / static_cast<double>(steps);
    if (max_kinetic_phase(g, atoms, h) >= 0.5) {
        throw DomainError("time step too large: kinetic phase per step " +
                          std::to_string(max_kinetic_phase(g, atoms, h)) + " rad >= 0.5");
    }
    if (opts.check_window) {
        double a_max = 0.0;
        for (const auto& [t0, a] : schedule.steps()) {
            if (t0 < state.time + duration) {
                a_max = std::max(a_max, a);
            }
        }
        check_window(state, g, atoms, v, a_max, duration);
    }

    CVec kin_full(n), kin_half(n), pot(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double k = g.wavenumbers[j];
        const double w = hbar * k * k / (2.0 * atoms.mass);
        kin_full[j] = std::polar(1.0 / static_cast<double>(n), -w * h);
        kin_half[j] = std::polar(1.0 / static_cast<double>(n), -0.5 * w * h);
        pot[j] = std::polar(1.0, -v(atoms.mass, g.z[j]) * h / hbar);
    }
    const Fft fft(n);
    const double peak0 = peak_density(state);
    const double t0 = state.time;
    auto& psi = state.amplitudes;

    fft.forward(psi);
    for (std::size_t j = 0; j < n; ++j) {
        psi[j] *= kin_half[j];
    }
    fft.backward(psi);
    for (std::size_t s = 0; s < steps; ++s) {
        const double t_mid = t0 + (static_cast<double>(s) + 0.5) * h;
        const double phase_per_density =
            coupling_1d(schedule.at(t_mid), atoms.omega_r) * state.atom_number * h / hbar;
        for (std::size_t j = 0; j < n; ++j) {
            const double theta = phase_per_density * std::norm(psi[j]);
            psi[j] *= pot[j] * cplx(std::cos(theta), -std::sin(theta));
        }
        fft.forward(psi);
        const CVec& kin = s + 1 == steps ? kin_half : kin_full;
        for (std::size_t j = 0; j < n; ++j) {
            psi[j] *= kin[j];
        }
        fft.backward(psi);
        if ((s & 63u) == 63u || s + 1 == steps) {
            const double peak = peak_density(state);
            if (!std::isfinite(peak)) {
                throw BlowUpError("non-finite amplitude", t0 + (s + 1) * h);
            }
            if (peak > opts.blow_up_factor * peak0) {
                throw BlowUpError("peak density grew past " +
                                      std::to_string(opts.blow_up_factor) + "x",
                                  t0 + (s + 1) * h);
            }
        }
    }
    state.time = t0 + duration;
    return state;
}

std::vector<WidthSample> expansion_series(const WaveState& initial, const Grid1D& g,
                                          const GuidedAtoms& atoms, const AxialPotential& v,
                                          double a, std::span<const double> sample_times,
                                          double dt) {
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        if (sample_times[i] < 0.0 || (i > 0 && !(sample_times[i] > sample_times[i - 1]))) {
            throw DomainError("sample times must be non-negative and increasing");
        }
    }
    std::vector<WidthSample> out;
    out.reserve(sample_times.size());
    if (sample_times.empty()) {
        return out;
    }
    const auto schedule = ScatteringSchedule::constant(a);
    // one window check for the whole run
    check_window(initial, g, atoms, v, std::max(a, 0.0), sample_times.back());
    EvolveOptions opts;
    opts.check_window = false;
    WaveState s = initial;
    const double t_start = s.time;
    double t = 0.0;
    for (double ts : sample_times) {
        s = evolve(std::move(s), g, atoms, v, schedule, ts - t, dt, opts);
        t = ts;
        s.time = t_start + t;
        out.push_back({ts, rms_width(s, g)});
    }
    return out;
}

SolitonSearch find_soliton_parameter(const WaveState& initial, const Grid1D& g,
                                     const GuidedAtoms& atoms, const AxialPotential& v,
                                     std::pair<double, double> a_range, double hold_time,
                                     const SolitonSearchOptions& opts) {
    const auto [lo, hi] = a_range;
    if (!(lo < hi)) {
        throw DomainError("scattering-length range must be increasing");
    }
    if (!(hold_time >= 0.0)) {
        throw DomainError("hold time must be non-negative");
    }
    if (opts.coarse_points < 3) {
        throw DomainError("coarse scan needs at least 3 points");
    }
    const std::size_t m = opts.coarse_points;
    const double step = (hi - lo) / static_cast<double>(m - 1);
    const double tol = opts.tolerance > 0.0 ? opts.tolerance : step / 64.0;

    auto width_at = [&](double a) {
        try {
            WaveState s = evolve(initial, g, atoms, v, ScatteringSchedule::constant(a), hold_time,
                                 opts.dt);
            return rms_width(s, g);
        } catch (const BlowUpError&) {
            // a collapsing cloud never minimises the expanded width
            return std::numeric_limits<double>::infinity();
        }
    };

    SolitonSearch out;
    out.coarse_step = step;
    std::vector<double> as(m);
    for (std::size_t i = 0; i < m; ++i) {
        as[i] = i + 1 == m ? hi : lo + step * static_cast<double>(i);
    }
    const std::vector<double> widths = parallel_map<double>(
        m, opts.workers, std::function<double(std::size_t)>([&](std::size_t i) {
            return width_at(as[i]);
        }));
    for (std::size_t i = 0; i < m; ++i) {
        out.scan.emplace_back(as[i], widths[i]);
    }
    const auto best = static_cast<std::size_t>(
        std::min_element(widths.begin(), widths.end()) - widths.begin());
    out.a_s = as[best];
    out.width = widths[best];
    if (best == 0 || best + 1 == m) {
        out.boundary_warning = true;
        return out;
    }

    // golden section on the bracket around the best coarse point
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = as[best - 1], b = as[best + 1];
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = width_at(c), fd = width_at(d);
    out.scan.emplace_back(c, fc);
    out.scan.emplace_back(d, fd);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = width_at(c);
            out.scan.emplace_back(c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = width_at(d);
            out.scan.emplace_back(d, fd);
        }
    }
    for (const auto& [aa, w] : out.scan) {
        if (w < out.width) {
            out.width = w;
            out.a_s = aa;
        }
    }
    return out;
}

} // namespace solmz

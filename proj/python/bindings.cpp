#include "solmz/commands.hpp"
#include "solmz/constants.hpp"
#include "solmz/error.hpp"
#include "solmz/feshbach.hpp"
#include "solmz/fit.hpp"
#include "solmz/gpe.hpp"
#include "solmz/interferometer.hpp"
#include "solmz/variational.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace solmz;

namespace {

py::array_t<std::complex<double>> to_numpy(const CVec& v) {
    py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

CVec from_numpy(py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> a) {
    if (a.ndim() != 1) throw DomainError("amplitudes must be one-dimensional");
    return CVec(a.data(), a.data() + a.size());
}

py::dict fit_dict(const FitResult& f) {
    py::dict d;
    for (std::size_t i = 0; i < f.parameters.size(); ++i) {
        d[py::str(f.parameters[i].first)] = f.parameters[i].second;
        d[py::str(f.parameters[i].first + "_err")] = f.standard_errors[i];
    }
    d["residual_norm"] = f.residual_norm;
    d["converged"] = f.converged;
    return d;
}

py::dict point_dict(const SurfacePoint& p) {
    py::dict d;
    d["gamma_rho"] = p.gamma_rho;
    d["gamma_z"] = p.gamma_z;
    d["energy"] = p.energy;
    d["kind"] = to_string(p.kind);
    d["gradient_norm"] = p.gradient_norm;
    d["iterations"] = p.iterations;
    return d;
}

Scenario scenario_from(const std::string& command, const std::string& config,
                       const std::map<std::string, std::string>& overrides) {
    Scenario sc = make_scenario(command);
    if (!config.empty()) sc.load_file(config);
    for (const auto& [k, v] : overrides) sc.set(k, v);
    validate_command(command, sc);
    return sc;
}

}

PYBIND11_MODULE(_core, m) {
    m.doc() = "Guided bright-soliton interferometer simulations";

    // later registrations take precedence, so the base class goes first
    auto& base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ResolutionError>(m, "ResolutionError", base.ptr());
    py::register_exception<FitError>(m, "FitError", base.ptr());
    py::register_exception<BlowUpError>(m, "BlowUpError", base.ptr());

    const Constants& c = constants();
    m.attr("hbar") = c.hbar;
    m.attr("a0") = c.a0;
    m.attr("mu_B") = c.mu_B;
    m.attr("gauss") = gauss;
    m.attr("micron") = micron;
    m.attr("mass_rb85") = rb85().mass;

    m.def("harmonic_length", &harmonic_length, py::arg("mass"), py::arg("omega"));
    m.def("interaction_parameter", &interaction_parameter, py::arg("atom_number"),
          py::arg("scattering_length"), py::arg("mass"), py::arg("omega_r"));
    m.def("coupling_1d", &coupling_1d, py::arg("a"), py::arg("omega_r"));

    m.def(
        "scattering_length",
        [](double B, double a_bg, double delta, double B0) {
            return scattering_length(make_resonance(a_bg, delta, B0), B);
        },
        py::arg("B"), py::arg("a_bg") = rb85_resonance().a_bg, py::arg("delta") = rb85_resonance().delta,
        py::arg("B0") = rb85_resonance().B0, "a(B) in metres for a field in tesla");
    m.def(
        "field_for_scattering_length",
        [](double a, double a_bg, double delta, double B0) {
            return field_for_scattering_length(make_resonance(a_bg, delta, B0), a);
        },
        py::arg("a"), py::arg("a_bg") = rb85_resonance().a_bg, py::arg("delta") = rb85_resonance().delta,
        py::arg("B0") = rb85_resonance().B0);
    m.def(
        "axial_frequency_squared",
        [](double curvature, int F, int mF) { return axial_frequency_squared({0.0, curvature, 0.0}, rb85(), F, mF); },
        py::arg("curvature"), py::arg("F") = 2, py::arg("m_F") = -2, "omega_z^2 for 85Rb; curvature in T/m^2");

    m.def(
        "variational_energy",
        [](double alpha, double lambda_sq, double gr, double gz) {
            return energy(make_variational_params(alpha, lambda_sq), gr, gz);
        },
        py::arg("alpha"), py::arg("lambda_sq"), py::arg("gamma_rho"), py::arg("gamma_z"));
    m.def(
        "variational_gradient",
        [](double alpha, double lambda_sq, double gr, double gz) {
            return gradient(make_variational_params(alpha, lambda_sq), gr, gz);
        },
        py::arg("alpha"), py::arg("lambda_sq"), py::arg("gamma_rho"), py::arg("gamma_z"));
    m.def(
        "find_stationary_point",
        [](double alpha, double lambda_sq, double gr, double gz) {
            return point_dict(find_stationary_point(make_variational_params(alpha, lambda_sq), {gr, gz}));
        },
        py::arg("alpha"), py::arg("lambda_sq"), py::arg("gamma_rho") = 1.0, py::arg("gamma_z") = 30.0);

    py::class_<Grid1D>(m, "Grid")
        .def(py::init(&make_grid), py::arg("n_points") = 4096, py::arg("extent") = 800e-6)
        .def_readonly("n_points", &Grid1D::n_points)
        .def_readonly("extent", &Grid1D::extent)
        .def_readonly("spacing", &Grid1D::spacing)
        .def_property_readonly("z", [](const Grid1D& g) { return py::array_t<double>(g.z.size(), g.z.data()); });

    py::class_<GuidedAtoms>(m, "Atoms")
        .def(py::init([](double mass, double omega_r) { return GuidedAtoms{mass, omega_r}; }),
             py::arg("mass") = rb85().mass, py::arg("omega_r") = 2 * pi * 70)
        .def_readwrite("mass", &GuidedAtoms::mass)
        .def_readwrite("omega_r", &GuidedAtoms::omega_r);

    py::class_<AxialPotential>(m, "Potential")
        .def(py::init([](double w2, double acc, double quartic) { return AxialPotential{w2, acc, quartic}; }),
             py::arg("omega_z_sq") = 0.0, py::arg("acceleration") = 0.0, py::arg("quartic_coeff") = 0.0)
        .def_readwrite("omega_z_sq", &AxialPotential::omega_z_sq)
        .def_readwrite("acceleration", &AxialPotential::acceleration)
        .def_readwrite("quartic_coeff", &AxialPotential::quartic_coeff);

    py::class_<WaveState>(m, "WaveState")
        .def_property(
            "amplitudes", [](const WaveState& s) { return to_numpy(s.amplitudes); },
            [](WaveState& s, py::array_t<std::complex<double>> a) { s.amplitudes = from_numpy(a); })
        .def_readwrite("atom_number", &WaveState::atom_number)
        .def_readwrite("time", &WaveState::time);

    m.def("sech_state", &sech_state, py::arg("grid"), py::arg("l_z"), py::arg("centre") = 0.0,
          py::arg("atom_number") = 1.0);
    m.def("gaussian_state", &gaussian_state, py::arg("grid"), py::arg("sigma"), py::arg("centre") = 0.0,
          py::arg("atom_number") = 1.0);
    m.def(
        "ground_state",
        [](const Grid1D& g, const GuidedAtoms& atoms, const AxialPotential& v, double a, double n) {
            py::gil_scoped_release release;
            return ground_state_imaginary_time(g, atoms, v, a, n).state;
        },
        py::arg("grid"), py::arg("atoms"), py::arg("potential"), py::arg("a"), py::arg("atom_number"));
    m.def(
        "evolve",
        [](const WaveState& s, const Grid1D& g, const GuidedAtoms& atoms, const AxialPotential& v, double a,
           double duration, double dt) {
            py::gil_scoped_release release;
            return evolve(s, g, atoms, v, ScatteringSchedule::constant(a), duration, dt);
        },
        py::arg("state"), py::arg("grid"), py::arg("atoms"), py::arg("potential"), py::arg("a"),
        py::arg("duration"), py::arg("dt") = 1e-6);
    m.def("norm", &norm, py::arg("state"), py::arg("grid"));
    m.def("rms_width", &rms_width, py::arg("state"), py::arg("grid"));
    m.def("centre_of_mass", &centre_of_mass, py::arg("state"), py::arg("grid"));

    m.def(
        "fringe_scan",
        [](const WaveState& s, const Grid1D& g, const GuidedAtoms& atoms, const AxialPotential& v, double a,
           double T, std::vector<double> phases, double dt, double buffer) {
            MZSequence seq;
            seq.T = T;
            seq.scattering_length = a;
            seq.potential = v;
            seq.dt = dt;
            seq.buffer = buffer;
            std::vector<FringePoint> pts;
            {
                py::gil_scoped_release release;
                pts = fringe_scan(seq, phases, g, atoms, s);
            }
            std::vector<double> out;
            for (const auto& p : pts) out.push_back(p.n_rel);
            return out;
        },
        py::arg("state"), py::arg("grid"), py::arg("atoms"), py::arg("potential"), py::arg("a"), py::arg("T"),
        py::arg("phases"), py::arg("dt") = 1e-6, py::arg("buffer") = 0.4e-3,
        "class-0 fraction at each phase of the final pulse");
    m.def("analytic_phase", &analytic_phase, py::arg("k"), py::arg("acceleration"), py::arg("T"));
    m.def("relative_velocity", &relative_velocity, py::arg("k"), py::arg("mass"));

    m.def(
        "fit_parabola", [](std::vector<double> x, std::vector<double> y) { return fit_dict(fit_parabola(x, y)); },
        py::arg("x"), py::arg("y"));
    m.def(
        "fit_fringe", [](std::vector<double> p, std::vector<double> n) { return fit_dict(fit_fringe(p, n)); },
        py::arg("phases"), py::arg("n_rel"));
    m.def(
        "fit_gaussian_decay",
        [](std::vector<double> T, std::vector<double> V) { return fit_dict(fit_gaussian_decay(T, V)); },
        py::arg("T"), py::arg("V"));
    m.def(
        "fit_quadratic_phase",
        [](std::vector<double> T, std::vector<double> phi, double k) {
            return fit_dict(fit_quadratic_phase(T, phi, k));
        },
        py::arg("T"), py::arg("phi"), py::arg("k"));

    m.def("command_names", &command_names);
    m.def(
        "dry_run",
        [](const std::string& command, const std::string& config, const std::map<std::string, std::string>& set) {
            return scenario_from(command, config, set).dump();
        },
        py::arg("command"), py::arg("config") = "", py::arg("set") = std::map<std::string, std::string>{});
    m.def(
        "run_command",
        [](const std::string& command, const std::string& config, const std::map<std::string, std::string>& set,
           const std::string& out, std::uint64_t seed, unsigned workers) {
            const Scenario sc = scenario_from(command, config, set);
            CommandResult r;
            {
                py::gil_scoped_release release;
                r = run_command(command, sc, {out, seed, workers});
            }
            py::dict d;
            d["report"] = r.report;
            d["files"] = r.files;
            d["warnings"] = r.warnings;
            return d;
        },
        py::arg("command"), py::arg("config") = "", py::arg("set") = std::map<std::string, std::string>{},
        py::arg("out") = ".", py::arg("seed") = 0, py::arg("workers") = 1);
}

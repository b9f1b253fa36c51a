#include "solmz/constants.hpp"
#include "solmz/error.hpp"
#include "solmz/fit.hpp"
#include "solmz/interferometer.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace solmz;

namespace {

const double a0 = constants().a0;
const double hbar = constants().hbar;
const double ms = 1e-3;
const double k = default_lattice_wavenumber();

double centroid(const CVec& v, const Grid1D& g) {
    double s = 0.0, w = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        s += std::norm(v[j]) * g.z[j];
        w += std::norm(v[j]);
    }
    return s / w;
}

TwoModeState plane_wave(const Grid1D& g, std::size_t mode) {
    WaveState s;
    s.atom_number = 1.0;
    s.amplitudes.resize(g.n_points);
    const double q = g.wavenumbers[mode];
    for (std::size_t j = 0; j < g.n_points; ++j) {
        s.amplitudes[j] = std::polar(1.0 / std::sqrt(g.extent), q * g.z[j]);
    }
    return two_mode_from(s, k);
}

std::vector<double> scan_phases(std::size_t n) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = 2 * pi * static_cast<double>(i) / static_cast<double>(n);
    return p;
}

}

TEST_CASE("lattice constants") {
    CHECK(k == doctest::Approx(8055365.778435366).epsilon(1e-12));
    CHECK(relative_velocity(k, rb85().mass) == doctest::Approx(12.049618163805892e-3).epsilon(1e-9));
    CHECK(analytic_phase(k, 5.2e-2, 1 * ms) == doctest::Approx(0.837758040957278).epsilon(1e-12));
}

TEST_CASE("instantaneous pulses act as beamsplitter and mirror") {
    const Grid1D g = make_grid(256, 100 * micron);
    const TwoModeState s = two_mode_from(gaussian_state(g, 5 * micron, 0.0), k);
    const TwoModeState h = apply_instantaneous_pulse(s, {PulseKind::half_pi, 0.3});
    CHECK(population_0(h, g) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(population_1(h, g) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(overlap_visibility(h, g) == doctest::Approx(1.0).epsilon(1e-12));
    const TwoModeState m = apply_instantaneous_pulse(s, {PulseKind::pi, 1.1});
    CHECK(population_1(m, g) == doctest::Approx(1.0).epsilon(1e-12));
    // the imprinted phase is -i e^{i phi}
    const std::complex<double> ratio = m.envelope_1[128] / s.envelope_0[128];
    CHECK(std::arg(ratio) == doctest::Approx(1.1 - pi / 2).epsilon(1e-12));
}

TEST_CASE("pulses compose as SU(2) rotations") {
    const Grid1D g = make_grid(256, 100 * micron);
    TwoModeState s = two_mode_from(gaussian_state(g, 5 * micron, 0.0), k);
    s = apply_instantaneous_pulse(s, {PulseKind::half_pi, 0.2});
    const TwoModeState twice = apply_instantaneous_pulse(apply_instantaneous_pulse(s, {PulseKind::half_pi, 0.7}),
                                                         {PulseKind::half_pi, 0.7});
    const TwoModeState once = apply_instantaneous_pulse(s, {PulseKind::pi, 0.7});
    const TwoModeState undone = apply_instantaneous_pulse(apply_instantaneous_pulse(s, {PulseKind::half_pi, 0.7}),
                                                          {PulseKind::half_pi, 0.7 + pi});
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t j = 0; j < g.n_points; ++j) {
        d1 += std::norm(twice.envelope_0[j] - once.envelope_0[j]) + std::norm(twice.envelope_1[j] - once.envelope_1[j]);
        d2 += std::norm(undone.envelope_0[j] - s.envelope_0[j]) + std::norm(undone.envelope_1[j] - s.envelope_1[j]);
    }
    CHECK(d1 < 1e-24);
    CHECK(d2 < 1e-24);
    CHECK(total_norm(twice, g) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("finite pulse follows the Rabi lineshape") {
    const Grid1D g = make_grid(1024, 400 * micron);
    const GuidedAtoms atoms = default_atoms();
    const double omega = 2 * pi * 10e3;
    const PulseSpec p = PulseSpec::finite(PulseKind::pi, 0.0, omega);
    CHECK(p.duration == doctest::Approx(pi / omega));
    for (std::size_t mode : {0u, 40u, 120u, 250u, 1024u - 90u}) {
        const TwoModeState s = apply_finite_pulse(plane_wave(g, mode), p, g, atoms);
        const double delta = 2 * hbar * g.wavenumbers[mode] * k / atoms.mass;
        const double gen = std::sqrt(omega * omega + delta * delta);
        const double expect = omega * omega / (gen * gen) * std::pow(std::sin(gen * p.duration / 2), 2);
        CHECK(population_1(s, g) == doctest::Approx(expect).epsilon(1e-9).scale(1e-12));
        CHECK(total_norm(s, g) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("short finite pulses approach the instantaneous limit") {
    const Grid1D g = make_grid(1024, 400 * micron);
    const GuidedAtoms atoms = default_atoms();
    const TwoModeState s = two_mode_from(gaussian_state(g, 5 * micron, 0.0), k);
    const TwoModeState ideal = apply_pulse(s, {PulseKind::half_pi, 0.4}, g, atoms);
    double prev = INFINITY;
    for (double rabi : {2 * pi * 1e4, 2 * pi * 1e5, 2 * pi * 1e6}) {
        const TwoModeState f = apply_pulse(s, PulseSpec::finite(PulseKind::half_pi, 0.4, rabi), g, atoms);
        double d = 0.0;
        for (std::size_t j = 0; j < g.n_points; ++j) {
            d += std::norm(f.envelope_0[j] - ideal.envelope_0[j]) + std::norm(f.envelope_1[j] - ideal.envelope_1[j]);
        }
        d = std::sqrt(d * g.spacing);
        // the residual is first order in the pulse length
        if (std::isfinite(prev)) CHECK(prev / d > 8.0);
        prev = d;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("pulse validation") {
    CHECK_THROWS_AS(PulseSpec::finite(PulseKind::pi, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(validate(PulseSpec{PulseKind::pi, 0.0, 1e-5, 1.0}), DomainError);
    CHECK_THROWS_AS(validate(PulseSpec{PulseKind::pi, NAN, 0.0, 0.0}), DomainError);
    CHECK_NOTHROW(validate(PulseSpec::finite(PulseKind::half_pi, 0.0, 1e5)));
}

TEST_CASE("diffracted class moves at the recoil velocity") {
    const Grid1D g = make_grid(2048, 400 * micron);
    const GuidedAtoms atoms = default_atoms();
    TwoModeState s = two_mode_from(gaussian_state(g, 5 * micron, -50 * micron, 1e4), k);
    s = apply_instantaneous_pulse(s, {PulseKind::half_pi, 0.0});
    s = evolve_two_mode(s, g, atoms, {}, 0.0, 5 * ms, 1e-6);
    const double v = relative_velocity(k, atoms.mass);
    CHECK(centroid(s.envelope_1, g) == doctest::Approx(-50 * micron + v * 5 * ms).epsilon(1e-9));
    CHECK(centroid(s.envelope_0, g) == doctest::Approx(-50 * micron).epsilon(1e-9));
    CHECK(v * 5 * ms == doctest::Approx(60.2 * micron).epsilon(1e-3));
}

TEST_CASE("cross-class mean field is twice the self term") {
    const Grid1D g = make_grid(1024, 800 * micron);
    const GuidedAtoms atoms = default_atoms();
    const double a = 5 * a0;
    TwoModeState s = two_mode_from(gaussian_state(g, 50 * micron, 0.0, 1e4), k);
    s = apply_instantaneous_pulse(s, {PulseKind::half_pi, 0.0});
    const double t = 0.2 * ms;
    TwoModeOptions with, without;
    without.cross_coupling = 0.0;
    const TwoModeState w = evolve_two_mode(s, g, atoms, {}, a, t, 1e-6, with);
    const TwoModeState o = evolve_two_mode(s, g, atoms, {}, a, t, 1e-6, without);
    const std::size_t c = g.n_points / 2;
    const double extra = std::arg(w.envelope_0[c] / o.envelope_0[c]);
    const double n1 = std::norm(s.envelope_1[c]);
    const double expect = -2.0 * coupling_1d(a, atoms.omega_r) * 1e4 * n1 * t / hbar;
    CHECK(extra == doctest::Approx(expect).epsilon(0.01));
    CHECK(total_norm(w, g) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ideal interferometer has unit contrast and periodic fringes") {
    const Grid1D g = make_grid(2048, 400 * micron);
    const GuidedAtoms atoms = default_atoms();
    const WaveState init = gaussian_state(g, 5 * micron, 0.0, 1e4);
    MZSequence seq;
    seq.T = 1 * ms;
    const auto phases = scan_phases(8);
    const auto pts = fringe_scan(seq, phases, g, atoms, init);
    std::vector<double> ph, n;
    for (const auto& p : pts) {
        ph.push_back(p.phase);
        n.push_back(p.n_rel);
    }
    const FitResult f = fit_fringe(ph, n);
    CHECK(f.value("V") == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(f.value("c") == doctest::Approx(0.5).epsilon(1e-6));

    const double base = run_mach_zehnder(seq, 0.9, g, atoms, init).n_rel;
    CHECK(run_mach_zehnder(seq, 0.9 + 2 * pi, g, atoms, init).n_rel == doctest::Approx(base).epsilon(1e-10));
    WaveState rotated = init;
    for (auto& c : rotated.amplitudes) c *= std::polar(1.0, 1.7);
    CHECK(run_mach_zehnder(seq, 0.9, g, atoms, rotated).n_rel == doctest::Approx(base).epsilon(1e-10));
    // the shared-prefix scan agrees with separate runs
    CHECK(pts[3].n_rel == doctest::Approx(run_mach_zehnder(seq, phases[3], g, atoms, init).n_rel).epsilon(1e-12));
}

TEST_CASE("uniform acceleration shifts the fringe by 2 k a T^2") {
    const Grid1D g = make_grid(2048, 400 * micron);
    const GuidedAtoms atoms = default_atoms();
    const WaveState init = gaussian_state(g, 5 * micron, 0.0, 1e4);
    MZSequence seq;
    seq.T = 1 * ms;
    seq.potential.acceleration = 0.05;
    const auto phases = scan_phases(8);
    const auto pts = fringe_scan(seq, phases, g, atoms, init);
    std::vector<double> ph, n;
    for (const auto& p : pts) {
        ph.push_back(p.phase);
        n.push_back(p.n_rel);
    }
    const FitResult f = fit_fringe(ph, n);
    CHECK(wrap_phase(f.value("Phi") - analytic_phase(k, 0.05, 1 * ms)) == doctest::Approx(0.0).scale(1e-6));
    CHECK(f.value("V") == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("attractive interactions reduce the contrast") {
    const Grid1D g = make_grid(2048, 400 * micron);
    const GuidedAtoms atoms = default_atoms();
    const WaveState init = sech_state(g, 1.2854025190330864 * micron, 0.0, 1e4);
    MZSequence seq;
    seq.T = 1 * ms;
    seq.scattering_length = -2.5 * a0;
    const MZOutcome out = run_mach_zehnder(seq, 0.0, g, atoms, init);
    const double v = overlap_visibility(out.before_final_pulse, g);
    CHECK(v < 0.999);
    CHECK(v > 0.9);
    CHECK(total_norm(out.final_state, g) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("scans are deterministic across worker counts") {
    const Grid1D g = make_grid(1024, 400 * micron);
    const GuidedAtoms atoms = default_atoms();
    const WaveState init = gaussian_state(g, 5 * micron, 0.0, 1e4);
    MZSequence seq;
    seq.T = 0.5 * ms;
    seq.scattering_length = 1 * a0;
    const auto phases = scan_phases(6);
    const auto a = fringe_scan(seq, phases, g, atoms, init, 1);
    const auto b = fringe_scan(seq, phases, g, atoms, init, 3);
    const auto c = fringe_scan(seq, phases, g, atoms, init, 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].n_rel == b[i].n_rel);
        CHECK(a[i].n_rel == c[i].n_rel);
    }
}

TEST_CASE("sequence validation") {
    MZSequence seq;
    seq.T = 0.0;
    CHECK_THROWS_AS(validate(seq), DomainError);
    MZSequence bad_buffer;
    bad_buffer.buffer = -1.0;
    CHECK_THROWS_AS(validate(bad_buffer), DomainError);
    MZSequence long_pulses;
    long_pulses.pulses[1] = PulseSpec::finite(PulseKind::pi, 0.0, 2 * pi * 100.0);
    CHECK_THROWS_AS(validate(long_pulses), DomainError);
}

#include "solmz/interferometer.hpp"

#include "solmz/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace solmz {

namespace {

void require_two_mode(const TwoModeState& s, const Grid1D& g) {
    if (s.envelope_0.size() != g.n_points || s.envelope_1.size() != g.n_points) {
        throw DomainError("two-mode state does not match the grid");
    }
}

double sum_norm(const CVec& v) {
    double sum = 0.0;
    for (const auto& c : v) {
        sum += std::norm(c);
    }
    return sum;
}

} // namespace

double default_lattice_wavenumber() { return 2.0 * pi / 780e-9; }

TwoModeState two_mode_from(const WaveState& s, double k_lattice) {
    TwoModeState out;
    out.envelope_0 = s.amplitudes;
    out.envelope_1.assign(s.amplitudes.size(), cplx(0.0, 0.0));
    out.k_lattice = k_lattice;
    out.atom_number = s.atom_number;
    out.time = s.time;
    return out;
}

double population_0(const TwoModeState& s, const Grid1D& g) {
    return sum_norm(s.envelope_0) * g.spacing;
}

double population_1(const TwoModeState& s, const Grid1D& g) {
    return sum_norm(s.envelope_1) * g.spacing;
}

double total_norm(const TwoModeState& s, const Grid1D& g) {
    return population_0(s, g) + population_1(s, g);
}

double overlap_visibility(const TwoModeState& s, const Grid1D& g) {
    require_two_mode(s, g);
    cplx overlap(0.0, 0.0);
    for (std::size_t j = 0; j < g.n_points; ++j) {
        overlap += std::conj(s.envelope_0[j]) * s.envelope_1[j];
    }
    return 2.0 * std::abs(overlap) * g.spacing / total_norm(s, g);
}

double PulseSpec::area() const { return kind == PulseKind::pi ? pi : 0.5 * pi; }

PulseSpec PulseSpec::finite(PulseKind kind, double phase, double rabi_frequency) {
    PulseSpec p{kind, phase, 0.0, rabi_frequency};
    if (!(rabi_frequency > 0.0)) {
        throw DomainError("finite pulse needs a positive Rabi frequency");
    }
    p.duration = p.area() / rabi_frequency;
    return p;
}

void validate(const PulseSpec& p) {
    if (!std::isfinite(p.phase)) {
        throw DomainError("pulse phase must be finite");
    }
    if (!(p.duration >= 0.0) || !std::isfinite(p.duration)) {
        throw DomainError("pulse duration must be non-negative");
    }
    if (p.duration > 0.0) {
        if (!(p.rabi_frequency > 0.0)) {
            throw DomainError("finite pulse needs a positive Rabi frequency");
        }
        if (std::abs(p.rabi_frequency * p.duration - p.area()) > 1e-6 * p.area()) {
            throw DomainError("pulse area rabi*duration must be pi/2 or pi");
        }
    }
}

TwoModeState apply_instantaneous_pulse(TwoModeState s, const PulseSpec& p) {
    if (p.duration != 0.0) {
        throw DomainError("instantaneous pulse must have zero duration");
    }
    const double theta = 0.5 * p.area();
    const double c = std::cos(theta);
    const cplx m01 = cplx(0.0, -1.0) * std::polar(std::sin(theta), -p.phase);
    const cplx m10 = cplx(0.0, -1.0) * std::polar(std::sin(theta), p.phase);
    for (std::size_t j = 0; j < s.envelope_0.size(); ++j) {
        const cplx a = s.envelope_0[j];
        const cplx b = s.envelope_1[j];
        s.envelope_0[j] = c * a + m01 * b;
        s.envelope_1[j] = m10 * a + c * b;
    }
    return s;
}

TwoModeState apply_finite_pulse(TwoModeState s, const PulseSpec& p, const Grid1D& g,
                                const GuidedAtoms& atoms) {
    validate(p);
    require_two_mode(s, g);
    if (!(p.duration > 0.0)) {
        throw DomainError("finite pulse needs a positive duration");
    }
    const double hbar = constants().hbar;
    const double m = atoms.mass;
    const double k = s.k_lattice;
    const double tau = p.duration;
    const double omega_half = 0.5 * p.rabi_frequency;
    const double recoil = 2.0 * hbar * k * k / m;  // resonant laser frequency difference
    const cplx edge = std::polar(1.0, -0.5 * recoil * tau);
    const cplx e_minus = std::polar(1.0, -p.phase);
    const cplx e_plus = std::polar(1.0, p.phase);
    const std::size_t n = g.n_points;
    const double inv_n = 1.0 / static_cast<double>(n);

    const Fft fft(n);
    fft.forward(s.envelope_0);
    fft.forward(s.envelope_1);
    for (std::size_t j = 0; j < n; ++j) {
        const double q = g.wavenumbers[j];
        const double e0 = hbar * q * q / (2.0 * m);
        const double delta = 2.0 * hbar * q * k / m;
        const double w = std::hypot(omega_half, 0.5 * delta);
        const double cw = std::cos(w * tau);
        const double sw = std::sin(w * tau) / w;
        const cplx global = std::polar(inv_n, -(e0 + 0.5 * delta) * tau);
        // rotating-frame propagator cos(W tau) I - i sin(W tau)/W M
        const cplx u00 = global * cplx(cw, sw * 0.5 * delta);
        const cplx u11 = global * cplx(cw, -sw * 0.5 * delta);
        const cplx u01 = global * cplx(0.0, -sw * omega_half) * e_minus;
        const cplx u10 = global * cplx(0.0, -sw * omega_half) * e_plus;
        const cplx a = s.envelope_0[j];
        const cplx b = s.envelope_1[j];
        s.envelope_0[j] = u00 * a + u01 * edge * b;
        s.envelope_1[j] = edge * (u10 * a + u11 * edge * b);
    }
    fft.backward(s.envelope_0);
    fft.backward(s.envelope_1);
    s.time += tau;
    return s;
}

TwoModeState apply_pulse(TwoModeState s, const PulseSpec& p, const Grid1D& g,
                         const GuidedAtoms& atoms) {
    validate(p);
    if (p.duration == 0.0) {
        return apply_instantaneous_pulse(std::move(s), p);
    }
    return apply_finite_pulse(std::move(s), p, g, atoms);
}

TwoModeState evolve_two_mode(TwoModeState s, const Grid1D& g, const GuidedAtoms& atoms,
                             const AxialPotential& v, double a, double duration, double dt,
                             const TwoModeOptions& opts) {
    require_two_mode(s, g);
    if (!(dt > 0.0)) {
        throw DomainError("time step must be positive");
    }
    if (!(duration >= 0.0)) {
        throw DomainError("duration must be non-negative");
    }
    if (!std::isfinite(opts.cross_coupling)) {
        throw DomainError("cross coupling must be finite");
    }
    if (duration == 0.0) {
        return s;
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
        // bound each arm by the cloud moving with either momentum for the whole run
        WaveState whole{s.envelope_0, s.atom_number, s.time};
        for (std::size_t j = 0; j < n; ++j) {
            whole.amplitudes[j] = std::sqrt(std::norm(s.envelope_0[j]) + std::norm(s.envelope_1[j]));
        }
        const double kick = 2.0 * hbar * s.k_lattice;
        check_window(whole, g, atoms, v, std::max(a, 0.0), duration, 0.0);
        check_window(whole, g, atoms, v, std::max(a, 0.0), duration, kick);
    }

    CVec kin0_full(n), kin0_half(n), kin1_full(n), kin1_half(n), pot(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double q0 = g.wavenumbers[j];
        const double q1 = q0 + 2.0 * s.k_lattice;
        const double w0 = hbar * q0 * q0 / (2.0 * atoms.mass);
        const double w1 = hbar * q1 * q1 / (2.0 * atoms.mass);
        kin0_full[j] = std::polar(1.0 / static_cast<double>(n), -w0 * h);
        kin0_half[j] = std::polar(1.0 / static_cast<double>(n), -0.5 * w0 * h);
        kin1_full[j] = std::polar(1.0 / static_cast<double>(n), -w1 * h);
        kin1_half[j] = std::polar(1.0 / static_cast<double>(n), -0.5 * w1 * h);
        pot[j] = std::polar(1.0, -v(atoms.mass, g.z[j]) * h / hbar);
    }
    const Fft fft(n);
    auto& p0 = s.envelope_0;
    auto& p1 = s.envelope_1;
    auto peak = [&] {
        double m = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            m = std::max(m, std::norm(p0[j]) + std::norm(p1[j]));
        }
        return m;
    };
    const double peak0 = peak();
    const double chi = opts.cross_coupling;
    const double phase_per_density = coupling_1d(a, atoms.omega_r) * s.atom_number * h / hbar;

    auto kinetic = [&](const CVec& k0, const CVec& k1) {
        fft.forward(p0);
        fft.forward(p1);
        for (std::size_t j = 0; j < n; ++j) {
            p0[j] *= k0[j];
            p1[j] *= k1[j];
        }
        fft.backward(p0);
        fft.backward(p1);
    };

    kinetic(kin0_half, kin1_half);
    for (std::size_t st = 0; st < steps; ++st) {
        for (std::size_t j = 0; j < n; ++j) {
            const double n0 = std::norm(p0[j]);
            const double n1 = std::norm(p1[j]);
            const double th0 = phase_per_density * (n0 + chi * n1);
            const double th1 = phase_per_density * (n1 + chi * n0);
            p0[j] *= pot[j] * cplx(std::cos(th0), -std::sin(th0));
            p1[j] *= pot[j] * cplx(std::cos(th1), -std::sin(th1));
        }
        if (st + 1 == steps) {
            kinetic(kin0_half, kin1_half);
        } else {
            kinetic(kin0_full, kin1_full);
        }
        if ((st & 63u) == 63u || st + 1 == steps) {
            const double pk = peak();
            if (!std::isfinite(pk)) {
                throw BlowUpError("non-finite amplitude", s.time + (st + 1) * h);
            }
            if (pk > opts.blow_up_factor * peak0) {
                throw BlowUpError("peak density grew past " +
                                      std::to_string(opts.blow_up_factor) + "x",
                                  s.time + (st + 1) * h);
            }
        }
    }
    s.time += duration;
    return s;
}

void validate(const MZSequence& seq) {
    if (!(seq.T > 0.0) || !std::isfinite(seq.T)) {
        throw DomainError("interpulse time T must be positive");
    }
    if (!(seq.buffer >= 0.0)) {
        throw DomainError("buffer must be non-negative");
    }
    if (!std::isfinite(seq.scattering_length)) {
        throw DomainError("scattering length must be finite");
    }
    if (!(seq.dt > 0.0)) {
        throw DomainError("time step must be positive");
    }
    if (!(seq.k_lattice >= 0.0) || !std::isfinite(seq.k_lattice)) {
        throw DomainError("lattice wavenumber must be finite and non-negative");
    }
    if (seq.pulses[0].kind != PulseKind::half_pi || seq.pulses[1].kind != PulseKind::pi ||
        seq.pulses[2].kind != PulseKind::half_pi) {
        throw DomainError("pulses must be ordered half_pi, pi, half_pi");
    }
    for (const auto& p : seq.pulses) {
        validate(p);
    }
    const auto& p = seq.pulses;
    if (seq.T < 0.5 * (p[0].duration + p[1].duration) ||
        seq.T < 0.5 * (p[1].duration + p[2].duration)) {
        throw DomainError("pulses overlap: T shorter than the pulse half-durations");
    }
}

namespace {

TwoModeState run_to_final_pulse(const MZSequence& seq, const Grid1D& g, const GuidedAtoms& atoms,
                                const WaveState& initial, TwoModeOptions& opts) {
    validate(seq);
    if (initial.amplitudes.size() != g.n_points) {
        throw DomainError("initial state does not match the grid");
    }
    const double total =
        2.0 * seq.buffer + 2.0 * seq.T + 0.5 * (seq.pulses[0].duration + seq.pulses[2].duration);
    opts.cross_coupling = seq.cross_coupling;

    TwoModeState s = two_mode_from(initial, seq.k_lattice);
    {
        // one window check covering the whole sequence
        WaveState whole = initial;
        check_window(whole, g, atoms, seq.potential, std::max(seq.scattering_length, 0.0), total);
        check_window(whole, g, atoms, seq.potential, std::max(seq.scattering_length, 0.0), total,
                     2.0 * constants().hbar * seq.k_lattice);
    }
    opts.check_window = false;
    const auto& p = seq.pulses;
    const double a = seq.scattering_length;
    s = evolve_two_mode(std::move(s), g, atoms, seq.potential, a, seq.buffer, seq.dt, opts);
    s = apply_pulse(std::move(s), p[0], g, atoms);
    s = evolve_two_mode(std::move(s), g, atoms, seq.potential, a,
                        seq.T - 0.5 * (p[0].duration + p[1].duration), seq.dt, opts);
    s = apply_pulse(std::move(s), p[1], g, atoms);
    s = evolve_two_mode(std::move(s), g, atoms, seq.potential, a,
                        seq.T - 0.5 * (p[1].duration + p[2].duration), seq.dt, opts);
    return s;
}

TwoModeState finish(const MZSequence& seq, double final_phase, const Grid1D& g,
                    const GuidedAtoms& atoms, TwoModeState s, const TwoModeOptions& opts) {
    PulseSpec last = seq.pulses[2];
    last.phase += final_phase;
    s = apply_pulse(std::move(s), last, g, atoms);
    return evolve_two_mode(std::move(s), g, atoms, seq.potential, seq.scattering_length,
                           seq.buffer, seq.dt, opts);
}

} // namespace

MZOutcome run_mach_zehnder(const MZSequence& seq, double final_phase, const Grid1D& g,
                           const GuidedAtoms& atoms, const WaveState& initial) {
    TwoModeOptions opts;
    MZOutcome out;
    out.before_final_pulse = run_to_final_pulse(seq, g, atoms, initial, opts);
    out.final_state = finish(seq, final_phase, g, atoms, out.before_final_pulse, opts);
    out.n_rel = population_0(out.final_state, g) / total_norm(out.final_state, g);
    return out;
}

std::vector<FringePoint> fringe_scan(const MZSequence& seq, std::span<const double> phases,
                                     const Grid1D& g, const GuidedAtoms& atoms,
                                     const WaveState& initial, unsigned workers) {
    for (double ph : phases) {
        if (!std::isfinite(ph)) {
            throw DomainError("scan phases must be finite");
        }
    }
    TwoModeOptions opts;
    const TwoModeState shared = run_to_final_pulse(seq, g, atoms, initial, opts);
    const std::vector<double> n_rel = parallel_map<double>(
        phases.size(), workers, std::function<double(std::size_t)>([&](std::size_t i) {
            const TwoModeState f = finish(seq, phases[i], g, atoms, shared, opts);
            return population_0(f, g) / total_norm(f, g);
        }));
    std::vector<FringePoint> out(phases.size());
    for (std::size_t i = 0; i < phases.size(); ++i) {
        out[i] = {phases[i], n_rel[i]};
    }
    return out;
}

double analytic_phase(double k, double accel, double T) { return 2.0 * k * accel * T * T; }

double relative_velocity(double k, double mass) {
    if (!(mass > 0.0)) {
        throw DomainError("mass must be positive");
    }
    return 2.0 * constants().hbar * k / mass;
}

} // namespace solmz

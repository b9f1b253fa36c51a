#pragma once

// Bragg Mach-Zehnder on two momentum-class envelopes. The full field is
// psi0(z) + psi1(z) exp(2 i k z); both envelopes share one grid and the
// fast 2k density grating is dropped.

#include "solmz/gpe.hpp"

#include <array>
#include <vector>

namespace solmz {

// 2 pi / 780 nm
double default_lattice_wavenumber();

struct TwoModeState {
    CVec envelope_0;
    CVec envelope_1;
    double k_lattice = 0.0;
    double atom_number = 0.0;
    double time = 0.0;
};

TwoModeState two_mode_from(const WaveState& s, double k_lattice);

double population_0(const TwoModeState& s, const Grid1D& g);
double population_1(const TwoModeState& s, const Grid1D& g);
double total_norm(const TwoModeState& s, const Grid1D& g);

// 2 |<psi0|psi1>| / norm, the fringe contrast a final beamsplitter can reach.
double overlap_visibility(const TwoModeState& s, const Grid1D& g);

enum class PulseKind { half_pi, pi };

struct PulseSpec {
    PulseKind kind = PulseKind::half_pi;
    double phase = 0.0;           // rad
    double duration = 0.0;        // s, 0 means instantaneous
    double rabi_frequency = 0.0;  // rad/s

    // Finite pulse whose area rabi * duration is pi/2 or pi.
    static PulseSpec finite(PulseKind kind, double phase, double rabi_frequency);
    double area() const;  // pi/2 or pi
};

void validate(const PulseSpec& p);

TwoModeState apply_instantaneous_pulse(TwoModeState s, const PulseSpec& p);

// Exact two-level evolution per plane wave q of the envelopes, with detuning
// 2 hbar q k / m and the laser phase referenced to the pulse centre.
// Potential and mean field are ignored for the pulse duration.
TwoModeState apply_finite_pulse(TwoModeState s, const PulseSpec& p, const Grid1D& g,
                                const GuidedAtoms& atoms);

// Dispatches on duration.
TwoModeState apply_pulse(TwoModeState s, const PulseSpec& p, const Grid1D& g,
                         const GuidedAtoms& atoms);

struct TwoModeOptions {
    double cross_coupling = 2.0;
    bool check_window = true;
    double blow_up_factor = 1e3;
};

// Split-step evolution at fixed a. Class 1 uses the kinetic operator of
// momentum hbar (q + 2k); each class feels g N (n_self + chi n_other).
TwoModeState evolve_two_mode(TwoModeState s, const Grid1D& g, const GuidedAtoms& atoms,
                             const AxialPotential& v, double a, double duration, double dt,
                             const TwoModeOptions& opts = {});

struct MZSequence {
    double T = 1e-3;                 // s, between pulse centres
    double scattering_length = 0.0;  // m, from the start of the pre-buffer to the end of the post-buffer
    double buffer = 0.4e-3;          // s
    AxialPotential potential;
    std::array<PulseSpec, 3> pulses{PulseSpec{PulseKind::half_pi}, PulseSpec{PulseKind::pi},
                                    PulseSpec{PulseKind::half_pi}};
    double cross_coupling = 2.0;
    double k_lattice = default_lattice_wavenumber();
    double dt = 1e-6;
};

void validate(const MZSequence& seq);

struct MZOutcome {
    double n_rel = 0.0;  // class-0 fraction at the end
    TwoModeState before_final_pulse;
    TwoModeState final_state;
};

// buffer, pulse 1, T, pulse 2, T, pulse 3, buffer. final_phase is added to
// the third pulse's own phase.
MZOutcome run_mach_zehnder(const MZSequence& seq, double final_phase, const Grid1D& g,
                           const GuidedAtoms& atoms, const WaveState& initial);

struct FringePoint {
    double phase = 0.0;
    double n_rel = 0.0;
};

// The evolution up to the last pulse does not depend on the scanned phase,
// so it runs once; the last pulse and post-buffer run per phase.
std::vector<FringePoint> fringe_scan(const MZSequence& seq, std::span<const double> phases,
                                     const Grid1D& g, const GuidedAtoms& atoms,
                                     const WaveState& initial, unsigned workers = 1);

// 2 k a T^2
double analytic_phase(double k, double accel, double T);

// 2 hbar k / m
double relative_velocity(double k, double mass);

} // namespace solmz

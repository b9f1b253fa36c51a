#pragma once

// Effective 1D Gross-Pitaevskii model of the guided cloud:
//
//   i hbar psi_t = -hbar^2/(2m) psi_zz + V(z) psi + g1D N |psi|^2 psi,
//   g1D = 2 hbar omega_r a,
//
// integrated with a Strang-split Fourier method. psi carries unit norm;
// the atom number lives next to it.

#include "solmz/constants.hpp"
#include "solmz/spectral.hpp"

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace solmz {

struct Grid1D {
    std::size_t n_points = 0;
    double extent = 0.0;  // m, full window
    double spacing = 0.0;
    std::vector<double> z;            // centred: z_j = (j - n/2) dz
    std::vector<double> wavenumbers;  // FFT order: 0, dk, ..., -dk

    double k_max() const;
};

// n_points must be a power of two >= 256.
Grid1D make_grid(std::size_t n_points, double extent);

// Default desk-scale window: 4096 points over 800 um.
Grid1D default_grid();

struct WaveState {
    CVec amplitudes;
    double atom_number = 0.0;
    double time = 0.0;
};

// Mass and radial confinement of the guided species.
struct GuidedAtoms {
    double mass = 0.0;
    double omega_r = 0.0;
};

// 85Rb in a 2 pi x 70 Hz radial guide.
GuidedAtoms default_atoms();

struct AxialPotential {
    double omega_z_sq = 0.0;    // rad^2/s^2, signed
    double acceleration = 0.0;  // m/s^2, uniform force +m a along z
    double quartic_coeff = 0.0; // J/m^4

    double operator()(double mass, double z) const {
        return 0.5 * mass * omega_z_sq * z * z - mass * acceleration * z +
               quartic_coeff * z * z * z * z;
    }
};

// Piecewise-constant a(t): entry i applies from its start time until the
// next entry starts.
class ScatteringSchedule {
public:
    ScatteringSchedule() = default;
    explicit ScatteringSchedule(std::vector<std::pair<double, double>> steps);
    static ScatteringSchedule constant(double a);

    double at(double t) const;
    const std::vector<std::pair<double, double>>& steps() const { return steps_; }

private:
    std::vector<std::pair<double, double>> steps_;
};

// 2 hbar omega_r a, J m.
double coupling_1d(double a, double omega_r);

double norm(const WaveState& s, const Grid1D& g);
void normalize(WaveState& s, const Grid1D& g);
double centre_of_mass(const WaveState& s, const Grid1D& g);
double rms_width(const WaveState& s, const Grid1D& g);
double peak_density(const WaveState& s);

// Mean-field energy per atom for fixed a, J.
double energy(const WaveState& s, const Grid1D& g, const GuidedAtoms& atoms,
              const AxialPotential& v, double a);

// Unit-norm sech(z - centre)/l_z on the grid. Requires l_z > 4 dz and the
// profile to have decayed by 1e-12 at the window edge.
WaveState sech_state(const Grid1D& g, double l_z, double centre, double atom_number = 1.0);

WaveState gaussian_state(const Grid1D& g, double sigma, double centre, double atom_number = 1.0);

struct GroundStateOptions {
    double tolerance = 1e-12;          // relative energy change per step
    double final_step = 1e-6;          // s, imaginary-time step of the last stage
    std::size_t max_steps_per_stage = 200000;
};

struct GroundState {
    WaveState state;
    std::vector<double> energy_trace;  // J, one entry per convergence check
};

// Imaginary-time relaxation from a Gaussian seed of the trap's oscillator
// width. Refuses non-confining potentials.
GroundState ground_state_imaginary_time(const Grid1D& g, const GuidedAtoms& atoms,
                                        const AxialPotential& v, double a, double atom_number,
                                        const GroundStateOptions& opts = {});

struct EvolveOptions {
    bool check_window = true;
    double blow_up_factor = 1e3;  // peak density growth that counts as collapse
};

// hbar k_max^2 / (2m) dt, the largest kinetic phase per step.
double max_kinetic_phase(const Grid1D& g, const GuidedAtoms& atoms, double dt);

// Strang splitting (half kinetic, potential + mean field, half kinetic) with
// adjacent kinetic halves fused. a is sampled at each step midpoint, so
// schedule changes act on step boundaries. The step count is
// ceil(duration / dt) with dt shrunk to land exactly on duration.
WaveState evolve(WaveState state, const Grid1D& g, const GuidedAtoms& atoms,
                 const AxialPotential& v, const ScatteringSchedule& schedule, double duration,
                 double dt, const EvolveOptions& opts = {});

// Upper estimate of the rms width over [0, duration] from the exact
// second-moment evolution of the quadratic part of the Hamiltonian, with
// any repulsive mean-field energy converted to kinetic energy.
double predicted_max_width(const WaveState& s, const Grid1D& g, const GuidedAtoms& atoms,
                           const AxialPotential& v, double a_max, double duration);

// Throws DomainError unless extent >= 6 x predicted width and the cloud
// stays inside the window. momentum_kick (kg m/s) is added to the mean
// momentum when tracking the centre.
void check_window(const WaveState& s, const Grid1D& g, const GuidedAtoms& atoms,
                  const AxialPotential& v, double a_max, double duration,
                  double momentum_kick = 0.0);

struct WidthSample {
    double time = 0.0;
    double width = 0.0;
};

// Widths at the requested times from one continuous evolution at fixed a.
std::vector<WidthSample> expansion_series(const WaveState& initial, const Grid1D& g,
                                          const GuidedAtoms& atoms, const AxialPotential& v,
                                          double a, std::span<const double> sample_times,
                                          double dt);

struct SolitonSearchOptions {
    std::size_t coarse_points = 13;
    double tolerance = 0.0;  // final bracket in m; 0 => coarse step / 64
    double dt = 1e-6;
    unsigned workers = 1;
};

struct SolitonSearch {
    double a_s = 0.0;
    double width = 0.0;                      // rms width at a_s after the hold
    std::vector<std::pair<double, double>> scan;  // (a, width), coarse then refinement
    bool boundary_warning = false;
    double coarse_step = 0.0;
};

// Width after `hold_time` as a function of a; coarse scan then golden
// section around the best coarse point.
SolitonSearch find_soliton_parameter(const WaveState& initial, const Grid1D& g,
                                     const GuidedAtoms& atoms, const AxialPotential& v,
                                     std::pair<double, double> a_range, double hold_time,
                                     const SolitonSearchOptions& opts = {});

// Runs fn(i) for i in [0, count) on up to `workers` threads. Results are
// stored by index, so ordering never depends on scheduling.
template <class T>
std::vector<T> parallel_map(std::size_t count, unsigned workers,
                            const std::function<T(std::size_t)>& fn);

} // namespace solmz

#include "solmz/detail/parallel.hpp"

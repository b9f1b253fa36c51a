#pragma once

// Variational energy surface of a Gaussian (radial) x sech (axial) trial
// wavefunction, in units of the radial oscillator: energy / (hbar omega_r),
// widths / sigma_r. The axial aspect ratio enters only squared, so it is
// kept as a signed real lambda_sq (negative for an expulsive guide).

#include <array>
#include <vector>

namespace solmz {

struct VariationalParams {
    double alpha = 0.0;      // N a / sigma_r, signed
    double lambda_sq = 0.0;  // (omega_z / omega_r)^2, signed
};

VariationalParams make_variational_params(double alpha, double lambda_sq);

enum class PointKind { minimum, saddle, maximum, degenerate };

const char* to_string(PointKind kind);

struct SurfacePoint {
    double gamma_rho = 0.0;
    double gamma_z = 0.0;
    double energy = 0.0;
    PointKind kind = PointKind::degenerate;
    double gradient_norm = 0.0;
    int iterations = 0;
};

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

double energy(const VariationalParams& p, double gamma_rho, double gamma_z);
Vec2 gradient(const VariationalParams& p, double gamma_rho, double gamma_z);
Mat2 hessian(const VariationalParams& p, double gamma_rho, double gamma_z);

// Eigenvalues of a symmetric 2x2 matrix, ascending.
Vec2 symmetric_eigenvalues(const Mat2& m);

// Eigenvalues with magnitude below 1e-8 count as degenerate.
PointKind classify(const Mat2& hess);

// Damped Newton on grad = 0: stops at |grad| < 1e-10 or after 200
// iterations. Steps are halved (down to 2^-30) until the iterate stays in
// the positive quadrant and the gradient norm does not grow.
SurfacePoint find_stationary_point(const VariationalParams& p, Vec2 initial_guess);

// gamma_z * sigma_rho, in metres.
double soliton_axial_width(const SurfacePoint& point, double sigma_rho);

struct SurfaceGrid {
    std::vector<double> gamma_rho;  // rows
    std::vector<double> gamma_z;    // columns
    std::vector<double> energy;     // row-major, rows x cols

    double at(std::size_t row, std::size_t col) const { return energy[row * gamma_z.size() + col]; }
};

// Inclusive uniform axes; rho_res x z_res evaluations.
SurfaceGrid surface_grid(const VariationalParams& p, Vec2 rho_range, Vec2 z_range,
                         std::size_t rho_res, std::size_t z_res);

} // namespace solmz

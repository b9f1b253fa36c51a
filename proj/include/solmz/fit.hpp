#pragma once

// Fitting chain used on simulated and measured data: parabolas (width vs
// time, field maps), cosine fringes, Gaussian visibility decay and the
// quadratic phase-vs-T law.
//
// Weights, when given, are inverse variances and the reported standard
// errors are absolute. Without weights the errors are scaled by the
// residual variance (n - p degrees of freedom).

#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace solmz {

struct FitResult {
    std::vector<std::pair<std::string, double>> parameters;
    std::vector<double> standard_errors;
    double residual_norm = 0.0;
    bool converged = false;
    int iterations = 0;

    double value(const std::string& name) const;
    double error(const std::string& name) const;
    std::size_t index(const std::string& name) const;
};

// y = c0 + c1 x + c2 x^2. Also reports "width_acceleration" = 2 c2.
FitResult fit_parabola(std::span<const double> xs, std::span<const double> ys,
                       std::span<const double> weights = {});

// N_rel = (V/2) cos(phi + Phi) + c, with V >= 0 and Phi in (-pi, pi].
FitResult fit_fringe(std::span<const double> phases, std::span<const double> n_rel,
                     std::span<const double> weights = {});

// V(T) = V0 exp(-(T / tau_g)^2); reports "V0", "tau_g" and "tau_half".
FitResult fit_gaussian_decay(std::span<const double> Ts, std::span<const double> Vs);

// Phi = 2 k a T^2 after model-guided unwrapping; reports "acceleration".
FitResult fit_quadratic_phase(std::span<const double> Ts, std::span<const double> phis,
                              double k);

// Nearest-branch continuation used by fit_quadratic_phase; exposed for tests.
std::vector<double> unwrap_quadratic_phase(std::span<const double> Ts,
                                           std::span<const double> phis, double k);

// Wraps into (-pi, pi].
double wrap_phase(double phi);

} // namespace solmz

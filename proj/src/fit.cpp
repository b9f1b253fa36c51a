#include "solmz/fit.hpp"

#include "solmz/constants.hpp"
#include "solmz/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

namespace solmz {

std::size_t FitResult::index(const std::string& name) const {
    for (std::size_t i = 0; i < parameters.size(); ++i) {
        if (parameters[i].first == name) {
            return i;
        }
    }
    throw DomainError("fit has no parameter '" + name + "'");
}

double FitResult::value(const std::string& name) const { return parameters[index(name)].second; }

double FitResult::error(const std::string& name) const { return standard_errors[index(name)]; }

double wrap_phase(double phi) {
    double w = std::remainder(phi, 2.0 * pi);
    if (w <= -pi) {
        w += 2.0 * pi;
    }
    return w;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_sizes(std::span<const double> xs, std::span<const double> ys,
                 std::span<const double> weights) {
    if (xs.size() != ys.size()) {
        throw FitError("x and y lengths differ");
    }
    if (!weights.empty() && weights.size() != xs.size()) {
        throw FitError("weights length differs from data");
    }
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw FitError("weights must be positive inverse variances");
        }
    }
}

VectorXd sqrt_weights(std::span<const double> weights, std::size_t n) {
    VectorXd sw = VectorXd::Ones(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < weights.size(); ++i) {
        sw[static_cast<Eigen::Index>(i)] = std::sqrt(weights[i]);
    }
    return sw;
}

// Covariance from a (weighted) Jacobian at the solution. Parameters whose
// column carries no information get an infinite error.
std::vector<double> standard_errors(const MatrixXd& J, double chi2, bool absolute) {
    const auto n = J.rows();
    const auto p = J.cols();
    std::vector<double> se(static_cast<std::size_t>(p), 0.0);
    double scale = 1.0;
    if (!absolute) {
        scale = n > p ? chi2 / static_cast<double>(n - p) : 0.0;
    }
    Eigen::JacobiSVD<MatrixXd> svd(J, Eigen::ComputeThinV);
    const VectorXd& s = svd.singularValues();
    const double tol = std::max<double>(1e-12 * (s.size() ? s[0] : 0.0), 1e-300);
    const MatrixXd& V = svd.matrixV();
    for (Eigen::Index j = 0; j < p; ++j) {
        double var = 0.0;
        bool singular = false;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            const double v = V(j, i);
            if (s[i] <= tol) {
                if (std::abs(v) > 1e-8) {
                    singular = true;
                }
                continue;
            }
            var += v * v / (s[i] * s[i]);
        }
        se[static_cast<std::size_t>(j)] =
            singular ? std::numeric_limits<double>::infinity() : std::sqrt(var * scale);
    }
    return se;
}

struct LmProblem {
    // residual r_i(p) = sw_i (model_i(p) - y_i); jac_i = sw_i d model_i / dp
    std::function<void(const VectorXd& p, VectorXd& r, MatrixXd& J)> eval;
};

struct LmOutcome {
    VectorXd p;
    VectorXd r;
    MatrixXd J;
    bool converged = false;
    int iterations = 0;
};

LmOutcome levenberg_marquardt(const LmProblem& prob, VectorXd p, int max_iter) {
    VectorXd r;
    MatrixXd J;
    prob.eval(p, r, J);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    LmOutcome out;
    for (int it = 1; it <= max_iter; ++it) {
        out.iterations = it;
        const MatrixXd A = J.transpose() * J;
        const VectorXd g = J.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, cost)) {
            out.converged = true;
            break;
        }
        bool accepted = false;
        for (int tries = 0; tries < 40; ++tries) {
            MatrixXd Ad = A;
            for (Eigen::Index i = 0; i < A.rows(); ++i) {
                Ad(i, i) += lambda * std::max(A(i, i), 1e-30);
            }
            const VectorXd step = Ad.ldlt().solve(-g);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            VectorXd p_new = p + step;
            VectorXd r_new;
            MatrixXd J_new;
            prob.eval(p_new, r_new, J_new);
            const double cost_new = r_new.squaredNorm();
            if (std::isfinite(cost_new) && cost_new <= cost) {
                const double rel = (cost - cost_new) / std::max(cost, 1e-300);
                const double step_rel = step.norm() / std::max(p.norm(), 1e-300);
                p = std::move(p_new);
                r = std::move(r_new);
                J = std::move(J_new);
                cost = cost_new;
                lambda = std::max(lambda * 0.3, 1e-12);
                accepted = true;
                if (rel < 1e-15 || step_rel < 1e-14) {
                    out.converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // no descent direction left: the current point is a minimum to
            // working precision
            out.converged = true;
        }
        if (out.converged) {
            break;
        }
    }
    out.p = p;
    out.r = r;
    out.J = J;
    return out;
}

} // namespace

FitResult fit_parabola(std::span<const double> xs, std::span<const double> ys,
                       std::span<const double> weights) {
    check_sizes(xs, ys, weights);
    std::set<double> distinct(xs.begin(), xs.end());
    if (distinct.size() < 3) {
        throw FitError("parabola fit needs at least 3 distinct x values");
    }
    const auto n = static_cast<Eigen::Index>(xs.size());
    double xscale = 0.0;
    for (double x : xs) {
        xscale = std::max(xscale, std::abs(x));
    }
    if (xscale == 0.0) {
        xscale = 1.0;
    }
    const VectorXd sw = sqrt_weights(weights, xs.size());
    MatrixXd X(n, 3);
    VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = xs[static_cast<std::size_t>(i)] / xscale;
        X(i, 0) = sw[i];
        X(i, 1) = sw[i] * u;
        X(i, 2) = sw[i] * u * u;
        y[i] = sw[i] * ys[static_cast<std::size_t>(i)];
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
    if (qr.rank() < 3) {
        throw FitError("parabola design matrix is rank deficient");
    }
    const VectorXd c = qr.solve(y);
    const VectorXd res = X * c - y;
    const double chi2 = res.squaredNorm();
    std::vector<double> se = standard_errors(X, chi2, !weights.empty());

    const double c0 = c[0];
    const double c1 = c[1] / xscale;
    const double c2 = c[2] / (xscale * xscale);
    se[1] /= xscale;
    se[2] /= xscale * xscale;

    FitResult out;
    out.parameters = {{"c0", c0}, {"c1", c1}, {"c2", c2}, {"width_acceleration", 2.0 * c2}};
    out.standard_errors = {se[0], se[1], se[2], 2.0 * se[2]};
    // residual in data units, independent of the rescaling above
    double rn = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = c0 + c1 * xs[i] + c2 * xs[i] * xs[i] - ys[i];
        rn += d * d;
    }
    out.residual_norm = std::sqrt(rn);
    out.converged = true;
    out.iterations = 1;
    return out;
}

FitResult fit_fringe(std::span<const double> phases, std::span<const double> n_rel,
                     std::span<const double> weights) {
    check_sizes(phases, n_rel, weights);
    const std::size_t n = phases.size();
    if (n < 4) {
        throw FitError("fringe fit needs at least 4 samples");
    }
    // phases all congruent mod pi leave cos and sin columns collinear
    bool spread = false;
    for (std::size_t i = 1; i < n && !spread; ++i) {
        spread = std::abs(std::sin(phases[i] - phases[0])) > 1e-9;
    }
    if (!spread) {
        throw FitError("fringe phases are all congruent mod pi");
    }

    // Discrete-Fourier quadrature seed at unit frequency, solved as the
    // small linear system so unequal spacing is handled too.
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        const Eigen::Vector3d f(std::cos(phases[i]), std::sin(phases[i]), 1.0);
        A += w * f * f.transpose();
        b += w * f * n_rel[i];
    }
    const Eigen::Vector3d q = A.ldlt().solve(b);
    // (V/2) cos(phi + Phi) = (V/2) cos Phi cos phi - (V/2) sin Phi sin phi
    VectorXd p(3);
    p << 2.0 * std::hypot(q[0], q[1]), std::atan2(-q[1], q[0]), q[2];

    const VectorXd sw = sqrt_weights(weights, n);
    LmProblem prob;
    prob.eval = [&](const VectorXd& par, VectorXd& r, MatrixXd& J) {
        r.resize(static_cast<Eigen::Index>(n));
        J.resize(static_cast<Eigen::Index>(n), 3);
        for (std::size_t i = 0; i < n; ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            const double arg = phases[i] + par[1];
            const double c = std::cos(arg), s = std::sin(arg);
            r[k] = sw[k] * (0.5 * par[0] * c + par[2] - n_rel[i]);
            J(k, 0) = sw[k] * 0.5 * c;
            J(k, 1) = -sw[k] * 0.5 * par[0] * s;
            J(k, 2) = sw[k];
        }
    };
    LmOutcome lm = levenberg_marquardt(prob, p, 200);
    if (!lm.converged) {
        throw FitError("fringe fit did not converge in 200 iterations (V=" +
                       std::to_string(lm.p[0]) + ", Phi=" + std::to_string(lm.p[1]) + ")");
    }
    double V = lm.p[0];
    double Phi = lm.p[1];
    if (V < 0.0) {
        V = -V;
        Phi += pi;
    }
    Phi = wrap_phase(Phi);

    // errors from the Jacobian at the canonical (V >= 0) point
    VectorXd canon(3);
    canon << V, Phi, lm.p[2];
    VectorXd r;
    MatrixXd J;
    prob.eval(canon, r, J);
    const std::vector<double> se = standard_errors(J, r.squaredNorm(), !weights.empty());

    FitResult out;
    out.parameters = {{"V", V}, {"Phi", Phi}, {"c", lm.p[2]}};
    out.standard_errors = se;
    double rn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = 0.5 * V * std::cos(phases[i] + Phi) + lm.p[2] - n_rel[i];
        rn += d * d;
    }
    out.residual_norm = std::sqrt(rn);
    out.converged = true;
    out.iterations = lm.iterations;
    return out;
}

FitResult fit_gaussian_decay(std::span<const double> Ts, std::span<const double> Vs) {
    check_sizes(Ts, Vs, {});
    const std::size_t n = Ts.size();
    if (n < 3) {
        throw FitError("Gaussian decay fit needs at least 3 points");
    }
    for (double v : Vs) {
        if (v < 0.0) {
            throw FitError("visibilities must be non-negative");
        }
    }
    // seed: ln V = ln V0 - T^2 / tau^2, weighted by V^2 so that the noisy
    // tail does not dominate
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (Vs[i] <= 0.0) {
            continue;
        }
        const double w = Vs[i] * Vs[i];
        const double x = Ts[i] * Ts[i];
        const double y = std::log(Vs[i]);
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    double V0 = *std::max_element(Vs.begin(), Vs.end());
    double tau = *std::max_element(Ts.begin(), Ts.end());
    const double det = sw * sxx - sx * sx;
    if (sw > 0.0 && det > 0.0) {
        const double slope = (sw * sxy - sx * sy) / det;
        const double icpt = (sy - slope * sx) / sw;
        if (slope < 0.0) {
            tau = 1.0 / std::sqrt(-slope);
            V0 = std::exp(icpt);
        }
    }
    if (!(tau > 0.0)) {
        throw FitError("cannot seed decay time");
    }

    // fit in units of the seed time so both parameters are O(1)
    const double tscale = tau;
    LmProblem prob;
    prob.eval = [&](const VectorXd& par, VectorXd& r, MatrixXd& J) {
        r.resize(static_cast<Eigen::Index>(n));
        J.resize(static_cast<Eigen::Index>(n), 2);
        for (std::size_t i = 0; i < n; ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            const double u = Ts[i] / tscale / par[1];
            const double e = std::exp(-u * u);
            r[k] = par[0] * e - Vs[i];
            J(k, 0) = e;
            J(k, 1) = par[0] * e * 2.0 * u * u / par[1];
        }
    };
    VectorXd p(2);
    p << V0, 1.0;
    LmOutcome lm = levenberg_marquardt(prob, p, 200);
    if (!lm.converged || !lm.p.allFinite()) {
        throw FitError("Gaussian decay fit did not converge");
    }
    const double tau_g = std::abs(lm.p[1]) * tscale;
    const std::vector<double> se = standard_errors(lm.J, lm.r.squaredNorm(), false);
    const double ln2 = std::sqrt(std::log(2.0));

    FitResult out;
    out.parameters = {{"V0", lm.p[0]}, {"tau_g", tau_g}, {"tau_half", tau_g * ln2}};
    out.standard_errors = {se[0], se[1] * tscale, se[1] * tscale * ln2};
    out.residual_norm = lm.r.norm();
    out.converged = true;
    out.iterations = lm.iterations;
    return out;
}

std::vector<double> unwrap_quadratic_phase(std::span<const double> Ts,
                                           std::span<const double> phis, double k) {
    if (Ts.size() != phis.size()) {
        throw FitError("T and phase lengths differ");
    }
    std::vector<std::size_t> order(Ts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return Ts[a] < Ts[b]; });

    std::vector<double> out(phis.begin(), phis.end());
    // running least-squares estimate of a through the origin: Phi = (2k T^2) a
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::size_t i = order[pos];
        const double x = 2.0 * k * Ts[i] * Ts[i];
        double phi = phis[i];
        if (sxx > 0.0) {
            const double predicted = (sxy / sxx) * x;
            const double turns = std::round((predicted - phi) / (2.0 * pi));
            phi += 2.0 * pi * turns;
            // less than a quarter turn of margin means the neighbouring
            // branch is nearly as plausible
            if (std::abs(phi - predicted) > 0.5 * pi) {
                throw FitError("phase unwrap is ambiguous at T=" + std::to_string(Ts[i]) +
                               " s (residual " + std::to_string(phi - predicted) + " rad)");
            }
        }
        out[i] = phi;
        sxx += x * x;
        sxy += x * phi;
    }
    return out;
}

FitResult fit_quadratic_phase(std::span<const double> Ts, std::span<const double> phis,
                              double k) {
    if (!(k > 0.0)) {
        throw FitError("lattice wavenumber must be positive");
    }
    std::set<double> distinct(Ts.begin(), Ts.end());
    if (distinct.size() < 2) {
        throw FitError("quadratic phase fit needs at least 2 distinct T");
    }
    const std::vector<double> unwrapped = unwrap_quadratic_phase(Ts, phis, k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        const double x = 2.0 * k * Ts[i] * Ts[i];
        sxx += x * x;
        sxy += x * unwrapped[i];
    }
    const double a = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        const double d = unwrapped[i] - a * 2.0 * k * Ts[i] * Ts[i];
        rss += d * d;
    }
    const std::size_t dof = Ts.size() > 1 ? Ts.size() - 1 : 1;
    FitResult out;
    out.parameters = {{"acceleration", a}};
    out.standard_errors = {std::sqrt(rss / static_cast<double>(dof) / sxx)};
    out.residual_norm = std::sqrt(rss);
    out.converged = true;
    out.iterations = 1;
    return out;
}

} // namespace solmz

#include "solmz/variational.hpp"

#include "solmz/constants.hpp"
#include "solmz/error.hpp"

#include <cmath>
#include <string>

namespace solmz {

namespace {

constexpr double kGradTol = 1e-10;
constexpr int kMaxIter = 200;
constexpr double kMinStep = 0x1p-30;
constexpr double kDegenerate = 1e-8;

void check_widths(double r, double z) {
    if (!(r > 0.0) || !(z > 0.0)) {
        throw DomainError("variational widths must be positive");
    }
}

double norm(const Vec2& v) { return std::hypot(v[0], v[1]); }

} // namespace

VariationalParams make_variational_params(double alpha, double lambda_sq) {
    if (!std::isfinite(alpha) || !std::isfinite(lambda_sq)) {
        throw DomainError("variational parameters must be finite");
    }
    return {alpha, lambda_sq};
}

const char* to_string(PointKind kind) {
    switch (kind) {
    case PointKind::minimum:
        return "minimum";
    case PointKind::saddle:
        return "saddle";
    case PointKind::maximum:
        return "maximum";
    case PointKind::degenerate:
        return "degenerate";
    }
    return "degenerate";
}

double energy(const VariationalParams& p, double r, double z) {
    check_widths(r, z);
    const double r2 = r * r, z2 = z * z;
    return 0.5 / r2 + 0.5 * r2 + 1.0 / (6.0 * z2) + pi * pi / 24.0 * p.lambda_sq * z2 +
           p.alpha / (3.0 * r2 * z);
}

Vec2 gradient(const VariationalParams& p, double r, double z) {
    check_widths(r, z);
    const double r3 = r * r * r, z2 = z * z;
    return {-1.0 / r3 + r - 2.0 * p.alpha / (3.0 * r3 * z),
            -1.0 / (3.0 * z2 * z) + pi * pi / 12.0 * p.lambda_sq * z -
                p.alpha / (3.0 * r * r * z2)};
}

Mat2 hessian(const VariationalParams& p, double r, double z) {
    check_widths(r, z);
    const double r2 = r * r, r4 = r2 * r2, z2 = z * z;
    const double rr = 3.0 / r4 + 1.0 + 2.0 * p.alpha / (r4 * z);
    const double zz = 1.0 / (z2 * z2) + pi * pi / 12.0 * p.lambda_sq +
                      2.0 * p.alpha / (3.0 * r2 * z2 * z);
    const double rz = 2.0 * p.alpha / (3.0 * r2 * r * z2);
    return {{{rr, rz}, {rz, zz}}};
}

Vec2 symmetric_eigenvalues(const Mat2& m) {
    const double mean = 0.5 * (m[0][0] + m[1][1]);
    const double half_diff = 0.5 * (m[0][0] - m[1][1]);
    const double rad = std::hypot(half_diff, m[0][1]);
    return {mean - rad, mean + rad};
}

PointKind classify(const Mat2& hess) {
    const Vec2 ev = symmetric_eigenvalues(hess);
    if (std::abs(ev[0]) < kDegenerate || std::abs(ev[1]) < kDegenerate) {
        return PointKind::degenerate;
    }
    if (ev[0] > 0.0) {
        return PointKind::minimum;
    }
    if (ev[1] < 0.0) {
        return PointKind::maximum;
    }
    return PointKind::saddle;
}

SurfacePoint find_stationary_point(const VariationalParams& p, Vec2 x) {
    if (!(x[0] > 0.0) || !(x[1] > 0.0)) {
        throw DomainError("initial guess must lie in the positive quadrant");
    }
    Vec2 g = gradient(p, x[0], x[1]);
    double gn = norm(g);
    int it = 0;
    while (gn >= kGradTol) {
        if (it == kMaxIter) {
            throw NoConvergenceError("Newton iteration cap reached with |grad|=" +
                                         std::to_string(gn),
                                     x[0], x[1]);
        }
        ++it;
        const Mat2 H = hessian(p, x[0], x[1]);
        const double det = H[0][0] * H[1][1] - H[0][1] * H[1][0];
        if (det == 0.0 || !std::isfinite(det)) {
            throw NoConvergenceError("singular Hessian", x[0], x[1]);
        }
        const Vec2 step = {-(H[1][1] * g[0] - H[0][1] * g[1]) / det,
                           -(-H[1][0] * g[0] + H[0][0] * g[1]) / det};
        double t = 1.0;
        bool left_domain = false;
        for (;;) {
            const Vec2 trial = {x[0] + t * step[0], x[1] + t * step[1]};
            if (trial[0] > 0.0 && trial[1] > 0.0) {
                left_domain = false;
                const Vec2 gt = gradient(p, trial[0], trial[1]);
                const double gtn = norm(gt);
                if (gtn <= gn || t <= kMinStep) {
                    x = trial;
                    g = gt;
                    gn = gtn;
                    break;
                }
            } else {
                left_domain = true;
            }
            if (t <= kMinStep) {
                if (left_domain) {
                    throw DomainError("Newton step leaves the positive quadrant at (" +
                                      std::to_string(x[0]) + ", " + std::to_string(x[1]) + ")");
                }
                throw NoConvergenceError("line search failed", x[0], x[1]);
            }
            t *= 0.5;
        }
        if (!std::isfinite(gn)) {
            throw NoConvergenceError("gradient became non-finite", x[0], x[1]);
        }
    }
    SurfacePoint out;
    out.gamma_rho = x[0];
    out.gamma_z = x[1];
    out.energy = energy(p, x[0], x[1]);
    out.kind = classify(hessian(p, x[0], x[1]));
    out.gradient_norm = gn;
    out.iterations = it;
    return out;
}

double soliton_axial_width(const SurfacePoint& point, double sigma_rho) {
    return point.gamma_z * sigma_rho;
}

SurfaceGrid surface_grid(const VariationalParams& p, Vec2 rho_range, Vec2 z_range,
                         std::size_t rho_res, std::size_t z_res) {
    if (rho_res == 0 || z_res == 0) {
        throw DomainError("grid resolution must be positive");
    }
    if (!(rho_range[0] > 0.0) || !(rho_range[1] >= rho_range[0]) || !(z_range[0] > 0.0) ||
        !(z_range[1] >= z_range[0])) {
        throw DomainError("grid ranges must be positive and ordered");
    }
    auto axis = [](Vec2 range, std::size_t n) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = n == 1 ? range[0]
                          : range[0] + (range[1] - range[0]) * static_cast<double>(i) /
                                           static_cast<double>(n - 1);
        }
        return v;
    };
    SurfaceGrid grid;
    grid.gamma_rho = axis(rho_range, rho_res);
    grid.gamma_z = axis(z_range, z_res);
    grid.energy.resize(rho_res * z_res);
    for (std::size_t i = 0; i < rho_res; ++i) {
        for (std::size_t j = 0; j < z_res; ++j) {
            grid.energy[i * z_res + j] = energy(p, grid.gamma_rho[i], grid.gamma_z[j]);
        }
    }
    return grid;
}

} // namespace solmz

#include "solmz/feshbach.hpp"

#include "solmz/error.hpp"
#include "solmz/fit.hpp"

#include <algorithm>
#include <cmath>

namespace solmz {

FeshbachResonance rb85_resonance() {
    return {-443.0 * constants().a0, 10.71 * gauss, 155.041 * gauss};
}

FeshbachResonance make_resonance(double a_bg, double delta, double B0) {
    if (delta == 0.0 || !std::isfinite(delta)) {
        throw DomainError("resonance width must be finite and nonzero");
    }
    if (!(B0 > 0.0)) {
        throw DomainError("resonance centre must be positive");
    }
    if (!std::isfinite(a_bg)) {
        throw DomainError("background scattering length must be finite");
    }
    return {a_bg, delta, B0};
}

double scattering_length(const FeshbachResonance& res, double B) {
    if (B == res.B0) {
        throw PoleError("field sits on the resonance centre");
    }
    return res.a_bg * (1.0 - res.delta / (B - res.B0));
}

double field_for_scattering_length(const FeshbachResonance& res, double a) {
    if (a == res.a_bg) {
        throw PoleError("a == a_bg is only reached as B -> infinity");
    }
    return res.B0 + res.delta / (1.0 - a / res.a_bg);
}

double FieldProfile::max_deviation(double z_lo, double z_hi) const {
    // |B - B_center| grows monotonically away from the vertex, so an endpoint wins.
    return std::max(std::abs(field(z_lo) - B_center), std::abs(field(z_hi) - B_center));
}

double axial_frequency_squared(const FieldProfile& profile, const Species& species, int F,
                               int mF) {
    if (!(species.mass > 0.0)) {
        throw DomainError("species mass must be positive");
    }
    return constants().mu_B * species.g_factor(F) * mF / species.mass * profile.curvature;
}

double rf_transition_frequency(double B, double g_F, int dmF) {
    if (B < 0.0) {
        throw DomainError("field magnitude must be non-negative");
    }
    return constants().mu_B * std::abs(dmF * g_F) * B / constants().h;
}

double field_from_rf_frequency(double frequency, double g_F, int dmF) {
    const double slope = constants().mu_B * std::abs(dmF * g_F) / constants().h;
    if (slope == 0.0) {
        throw DomainError("transition has no linear Zeeman shift");
    }
    return frequency / slope;
}

FieldMap field_map_from_rf(std::span<const RfSample> samples, double g_F, int dmF) {
    std::vector<double> zs, Bs;
    zs.reserve(samples.size());
    Bs.reserve(samples.size());
    for (const auto& s : samples) {
        zs.push_back(s.position);
        Bs.push_back(field_from_rf_frequency(s.frequency, g_F, dmF));
    }
    // Centre the regressors: z ~ 1e-3 m makes the raw (1, z, z^2) basis badly scaled.
    double z_mean = 0.0;
    for (double z : zs) {
        z_mean += z;
    }
    z_mean /= static_cast<double>(std::max<std::size_t>(zs.size(), 1));
    std::vector<double> dz(zs.size());
    std::transform(zs.begin(), zs.end(), dz.begin(), [&](double z) { return z - z_mean; });

    const FitResult fit = fit_parabola(dz, Bs);
    const double c0 = fit.value("c0"), c1 = fit.value("c1"), c2 = fit.value("c2");

    FieldMap map;
    map.profile.curvature = 2.0 * c2;
    map.curvature_stderr = 2.0 * fit.error("c2");
    if (c2 != 0.0) {
        const double vertex = -c1 / (2.0 * c2);
        map.profile.z_offset = z_mean + vertex;
        map.profile.B_center = c0 - c1 * c1 / (4.0 * c2);
        // first-order propagation through the vertex shift is dominated by c0
        map.B_center_stderr = fit.error("c0");
    } else {
        map.profile.z_offset = z_mean;
        map.profile.B_center = c0;
        map.B_center_stderr = fit.error("c0");
    }
    map.residuals.resize(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) {
        map.residuals[i] = Bs[i] - map.profile.field(zs[i]);
    }
    return map;
}

} // namespace solmz

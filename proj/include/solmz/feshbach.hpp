#pragma once

// Feshbach-resonance control of the s-wave scattering length, the axial
// (anti-)trapping frequency produced by bias-field curvature, and r.f.
// field mapping along the waveguide. All quantities SI (fields in tesla);
// gauss only appears at the CLI/CSV boundary.

#include "solmz/constants.hpp"

#include <span>
#include <vector>

namespace solmz {

struct FeshbachResonance {
    double a_bg = 0.0;   // m, may be negative
    double delta = 0.0;  // T, nonzero
    double B0 = 0.0;     // T, > 0
};

// 85Rb |F=2, mF=-2>: a_bg = -443 a0, width 10.71 G, centre 155.041 G.
FeshbachResonance rb85_resonance();

FeshbachResonance make_resonance(double a_bg, double delta, double B0);

// a(B) = a_bg (1 - delta / (B - B0)). Throws PoleError at B == B0.
double scattering_length(const FeshbachResonance& res, double B);

// Inverse on the branch above B0: B = B0 + delta / (1 - a / a_bg).
double field_for_scattering_length(const FeshbachResonance& res, double a);

// B(z) = B_center + curvature (z - z_offset)^2 / 2
struct FieldProfile {
    double B_center = 0.0;   // T
    double curvature = 0.0;  // T/m^2
    double z_offset = 0.0;   // m

    double field(double z) const {
        const double d = z - z_offset;
        return B_center + 0.5 * curvature * d * d;
    }
    double max_deviation(double z_lo, double z_hi) const;
};

// mu_B gF mF / m * d2B/dz2, signs propagated. Negative => expulsive.
double axial_frequency_squared(const FieldProfile& profile, const Species& species, int F,
                               int mF);

// mu_B |dmF gF| B / h, in Hz.
double rf_transition_frequency(double B, double g_F, int dmF);
double field_from_rf_frequency(double frequency, double g_F, int dmF);

struct RfSample {
    double position = 0.0;   // m
    double frequency = 0.0;  // Hz
};

struct FieldMap {
    FieldProfile profile;
    double curvature_stderr = 0.0;
    double B_center_stderr = 0.0;
    std::vector<double> residuals;  // T, per sample
};

// Converts each resonant frequency to a field and least-squares fits the
// parabolic profile. Needs >= 3 distinct positions.
FieldMap field_map_from_rf(std::span<const RfSample> samples, double g_F, int dmF);

} // namespace solmz

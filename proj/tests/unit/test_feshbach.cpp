#include "solmz/commands.hpp"
#include "solmz/error.hpp"
#include "solmz/feshbach.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace solmz;

namespace {
const double a0 = constants().a0;
const double mG = 1e-3 * gauss;
const double per_mm2 = 1e6;
}

TEST_CASE("default resonance") {
    const FeshbachResonance r = rb85_resonance();
    CHECK(r.a_bg == doctest::Approx(-443 * a0));
    CHECK(r.delta == doctest::Approx(10.71 * gauss));
    CHECK(r.B0 == doctest::Approx(155.041 * gauss));
    CHECK_THROWS_AS(make_resonance(-443 * a0, 0.0, 155 * gauss), DomainError);
    CHECK_THROWS_AS(make_resonance(-443 * a0, 1 * gauss, -1.0), DomainError);
}

TEST_CASE("scattering length near the zero crossing") {
    const auto r = rb85_resonance();
    const double a = scattering_length(r, 165.75 * gauss);
    CHECK(std::abs(a) < 0.1 * a0);
    CHECK(a / a0 == doctest::Approx(0.041367074423577455).epsilon(1e-9));
    CHECK(scattering_length(r, 1e6 * gauss) / r.a_bg == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(scattering_length(r, 166.53 * gauss) / a0 == doctest::Approx(-30.0).epsilon(2e-3));
    CHECK_THROWS_AS(scattering_length(r, r.B0), PoleError);
}

TEST_CASE("field for a scattering length") {
    const auto r = rb85_resonance();
    CHECK(field_for_scattering_length(r, 0.0) == r.B0 + r.delta);
    CHECK(field_for_scattering_length(r, 0.0) / gauss == doctest::Approx(165.751).epsilon(1e-12));
    CHECK(field_for_scattering_length(r, -30 * a0) / gauss ==
          doctest::Approx(166.52896610169492).epsilon(1e-12));
    CHECK_THROWS_AS(field_for_scattering_length(r, r.a_bg), PoleError);
}

TEST_CASE("inverse round trip on the upper branch") {
    const auto r = rb85_resonance();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> as(-400.0, 400.0);
    for (int i = 0; i < 100; ++i) {
        const double a = as(rng) * a0;
        const double back = scattering_length(r, field_for_scattering_length(r, a));
        CHECK(std::abs(back - a) <= 1e-10 * std::abs(a));
    }
    std::uniform_real_distribution<double> Bs(156.0, 400.0);
    for (int i = 0; i < 100; ++i) {
        const double B = Bs(rng) * gauss;
        CHECK(field_for_scattering_length(r, scattering_length(r, B)) ==
              doctest::Approx(B).epsilon(1e-10));
    }
}

TEST_CASE("a(B) decreases on each side of the pole") {
    const auto r = rb85_resonance();
    double prev = scattering_length(r, 140 * gauss);
    for (double B = 140.01; B < 155.0; B += 0.01) {
        const double a = scattering_length(r, B * gauss);
        CHECK(a < prev);
        prev = a;
    }
    prev = scattering_length(r, 155.1 * gauss);
    for (double B = 155.11; B < 200.0; B += 0.01) {
        const double a = scattering_length(r, B * gauss);
        CHECK(a < prev);
        prev = a;
    }
}

TEST_CASE("axial frequency from field curvature") {
    const FieldProfile p{165.776 * gauss, -103 * mG * per_mm2, 0.0};
    const double w2 = axial_frequency_squared(p, rb85(), 2, -2);
    CHECK(w2 == doctest::Approx(-451.6438871340327).epsilon(1e-9));
    CHECK(std::sqrt(-w2) / (2 * pi) == doctest::Approx(3.4).epsilon(0.1 / 3.4));
    FieldProfile flipped = p;
    flipped.curvature = -p.curvature;
    CHECK(axial_frequency_squared(flipped, rb85(), 2, -2) == doctest::Approx(-w2));
    FieldProfile doubled = p;
    doubled.curvature = 2 * p.curvature;
    CHECK(axial_frequency_squared(doubled, rb85(), 2, -2) == doctest::Approx(2 * w2));
    FieldProfile flat = p;
    flat.curvature = 0.0;
    CHECK(axial_frequency_squared(flat, rb85(), 2, -2) == 0.0);
}

TEST_CASE("field deviation over the run window") {
    const FieldProfile p{165.776 * gauss, -103 * mG * per_mm2, 0.0};
    // 4 mG is reached at |z| = sqrt(8 / 103) mm = 0.279 mm
    CHECK(p.max_deviation(-0.27e-3, 0.27e-3) < 4 * mG);
    CHECK(p.max_deviation(-0.29e-3, 0.29e-3) > 4 * mG);
    CHECK(p.max_deviation(-1e-3, 1e-3) == doctest::Approx(51.5 * mG));
}

TEST_CASE("r.f. transition frequency") {
    CHECK(rf_transition_frequency(165.776 * gauss, -0.5, 1) ==
          doctest::Approx(116.01207667289964e6).epsilon(1e-9));
    CHECK(rf_transition_frequency(0.0, -0.5, 1) == 0.0);
    CHECK(rf_transition_frequency(2.0 * gauss, -0.5, 1) ==
          doctest::Approx(2.0 * rf_transition_frequency(1.0 * gauss, -0.5, 1)));
    CHECK_THROWS_AS(rf_transition_frequency(-1.0, -0.5, 1), DomainError);
    const double f = rf_transition_frequency(165.0 * gauss, -1.0 / 3.0, 1);
    CHECK(field_from_rf_frequency(f, -1.0 / 3.0, 1) == doctest::Approx(165.0 * gauss));
}

TEST_CASE("field map recovers a noiseless profile") {
    const FieldProfile truth{165.776 * gauss, -10.3, 0.1e-3};
    std::vector<double> zs;
    for (int i = 0; i < 21; ++i) {
        zs.push_back(-2e-3 + 4e-3 * i / 20.0);
    }
    std::mt19937_64 rng(1);
    const auto samples = synthetic_rf_samples(truth, -0.5, 1, zs, 0.0, rng);
    const FieldMap m = field_map_from_rf(samples, -0.5, 1);
    CHECK(m.profile.B_center == doctest::Approx(truth.B_center).epsilon(1e-9));
    CHECK(m.profile.curvature == doctest::Approx(truth.curvature).epsilon(1e-9));
    CHECK(m.profile.z_offset == doctest::Approx(truth.z_offset).epsilon(1e-6));
}

TEST_CASE("noisy field map stays within three standard errors") {
    const FieldProfile truth{165.776 * gauss, -10.3, 0.0};
    std::vector<double> zs;
    for (int i = 0; i < 40; ++i) {
        zs.push_back(-2e-3 + 4e-3 * i / 39.0);
    }
    int inside = 0;
    constexpr int kRuns = 200;
    for (int seed = 0; seed < kRuns; ++seed) {
        std::mt19937_64 rng(seed);
        const auto samples = synthetic_rf_samples(truth, -0.5, 1, zs, 0.5 * mG, rng);
        const FieldMap m = field_map_from_rf(samples, -0.5, 1);
        CHECK(m.curvature_stderr > 0.0);
        if (std::abs(m.profile.curvature - truth.curvature) <= 3.0 * m.curvature_stderr) {
            ++inside;
        }
    }
    // 3 sigma with 37 degrees of freedom covers ~99.5 %
    CHECK(inside >= 195);
}

TEST_CASE("field map needs three distinct positions") {
    const std::vector<RfSample> two{{0.0, 116e6}, {1e-3, 116.1e6}, {1e-3, 116.2e6}};
    CHECK_THROWS_AS(field_map_from_rf(two, -0.5, 1), FitError);
}

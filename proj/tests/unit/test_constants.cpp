#include "solmz/constants.hpp"
#include "solmz/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace solmz;

namespace {
const double a0 = constants().a0;
const double w70 = 2.0 * pi * 70.0;
}

TEST_CASE("constants are positive with the Bohr radius at the quoted precision") {
    const Constants& c = constants();
    CHECK(c.hbar > 0.0);
    CHECK(c.mu_B > 0.0);
    CHECK(c.h > 0.0);
    CHECK(c.a0 == doctest::Approx(5.29e-11).epsilon(1e-3));
    CHECK(c.h / c.hbar == doctest::Approx(2.0 * pi).epsilon(1e-5));
}

TEST_CASE("species data") {
    CHECK(rb85().mass == doctest::Approx(84.9118 * constants().amu));
    CHECK(rb87().mass > rb85().mass);
    CHECK(rb85().g_factor(2) == doctest::Approx(-1.0 / 3.0));
    CHECK(rb87().g_factor(1) == doctest::Approx(-0.5));
    CHECK_THROWS_AS(rb85().g_factor(7), DomainError);
}

TEST_CASE("harmonic length") {
    CHECK(harmonic_length(rb85().mass, w70) == doctest::Approx(1.3040374312250125e-6).epsilon(1e-9));
    CHECK(harmonic_length(rb87().mass, w70) == doctest::Approx(1.288965238295159e-6).epsilon(1e-9));
    CHECK(harmonic_length(rb87().mass, w70) < harmonic_length(rb85().mass, w70));
    const double m = rb85().mass;
    CHECK(harmonic_length(m, w70) / harmonic_length(m, 4.0 * w70) == doctest::Approx(2.0));
    CHECK_THROWS_AS(harmonic_length(0.0, w70), DomainError);
    CHECK_THROWS_AS(harmonic_length(m, -1.0), DomainError);
}

TEST_CASE("halving omega stretches the length by sqrt 2") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mass(1e-27, 1e-24), omega(1.0, 1e5);
    for (int i = 0; i < 50; ++i) {
        const double m = mass(rng), w = omega(rng);
        CHECK(harmonic_length(m, 0.5 * w) / harmonic_length(m, w) ==
              doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    }
}

TEST_CASE("interaction parameter") {
    const double m = rb85().mass;
    const double alpha = interaction_parameter(1e4, -30 * a0, m, w70);
    CHECK(alpha == doctest::Approx(-12.173968031797017).epsilon(1e-9));
    CHECK(std::abs(std::abs(alpha) - 12.0) <= 2.0);
    CHECK(interaction_parameter(1.5e4, -30 * a0, m, w70) ==
          doctest::Approx(-18.260952047695525).epsilon(1e-9));
    CHECK(interaction_parameter(1e4, 0.0, m, w70) == 0.0);
    CHECK(interaction_parameter(2e4, -30 * a0, m, w70) == doctest::Approx(2.0 * alpha));
    CHECK(interaction_parameter(1e4, -60 * a0, m, w70) == doctest::Approx(2.0 * alpha));
    CHECK_THROWS_AS(interaction_parameter(0.0, a0, m, w70), DomainError);
    CHECK_THROWS_AS(interaction_parameter(1.0, a0, m, 0.0), DomainError);
}

TEST_CASE("trap geometry keeps the sign of omega_z squared") {
    const TrapGeometry t = make_trap(w70, -400.0);
    CHECK(t.expulsive());
    CHECK_FALSE(make_trap(w70, 0.0).expulsive());
    CHECK_THROWS_AS(make_trap(0.0, 1.0), DomainError);
}

TEST_CASE("serialisation round-trips bit-exactly") {
    const Constants back = deserialize_constants(serialize(constants()));
    CHECK(back == constants());
    CHECK(deserialize_species(serialize(rb85())) == rb85());
    CHECK(deserialize_species(serialize(rb87())) == rb87());
    CHECK_THROWS_AS(deserialize_constants("hbar = nonsense\n"), ParseError);
}

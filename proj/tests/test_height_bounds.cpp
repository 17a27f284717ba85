#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ptess/height_bounds.hpp"
#include "ptess/numerics.hpp"

using namespace ptess;

TEST_CASE("gaussian sup bound at the reference point") {
    // A = 1, d = 2: A^m / (sqrt(pi) Gamma(3/2)) = 2/pi and the exponential factor is 1.
    CHECK(growth_bound(BoundId::SupGaussian, {2, 1.0, 4.0, 0, 0}) == doctest::Approx(std::exp(-2.0 / M_PI)).epsilon(1e-12));
    CHECK(growth_bound(BoundId::SupGaussian, {2, 1.0, 4.0, 0, 0}) == doctest::Approx(0.529078).epsilon(1e-6));
}

TEST_CASE("gaussian inf bound") {
    const double expected = -std::expm1(-(2.0 / std::sqrt(M_PI)) * 2.0 * std::exp(-5.0));
    CHECK(growth_bound(BoundId::InfGaussian, {2, 1.0, -10.0, 0, 0}) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(growth_bound(BoundId::InfGaussian, {2, 1.0, -10.0, 0, 0}) == doctest::Approx(0.015091).epsilon(1e-4));
}

TEST_CASE("trivial ranges of the bounds") {
    CHECK(growth_bound(BoundId::SupBeta, {3, 2.0, 16.0, 2.0, 1.0}) == 1.0);
    CHECK(growth_bound(BoundId::SupBeta, {3, 2.0, 10.0, 2.0, 1.0}) == 1.0);
    CHECK(growth_bound(BoundId::SupBetaPrime, {2, 1.0, 4.0 + 2 * 5.0, 5.0, 0}) == 0.0);
    CHECK(growth_bound(BoundId::InfBetaPrime, {2, 1.0, 0.0, 5.0, 5.0}) == 1.0);
}

TEST_CASE("sup beta closed form") {
    // d = 3, A = 1: A^2 / (2^{3/2} sqrt(pi) Gamma(2)).
    const double k = 1.0 / (std::pow(2.0, 1.5) * std::sqrt(M_PI));
    const double T = 6.0, b0 = 2.0;
    const double expected = std::exp(-k * std::pow(1 + (T - 4) / (2 * b0), b0));
    CHECK(growth_bound(BoundId::SupBeta, {3, 1.0, T, 3.0, b0}) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("monotonicity") {
    for (BoundId id : {BoundId::SupBeta, BoundId::SupBetaPrime, BoundId::SupGaussian}) {
        double prev = 2.0;
        for (double T = 4.5; T < 30; T += 0.5) {
            const double p = growth_bound(id, {3, 1.0, T, 20.0, 1.0});
            CHECK(p <= prev);
            prev = p;
        }
    }
    for (BoundId id : {BoundId::InfBeta, BoundId::InfBetaPrime, BoundId::InfGaussian}) {
        double prev = -1.0;
        for (double t = -40; t < -0.1; t += 0.5) {
            const double p = growth_bound(id, {3, 1.0, t, 20.0, 10.0});
            CHECK(p >= prev);
            CHECK(p <= 1.0);
            prev = p;
        }
    }
}

TEST_CASE("parameter checks") {
    CHECK_THROWS_AS(growth_bound(BoundId::SupBeta, {3, 1.0, 6.0, 1.0, 2.0}), ParameterError);
    CHECK_THROWS_AS(growth_bound(BoundId::SupBeta, {3, 1.0, 6.0, 1.0, 0.5}), ParameterError);
    CHECK_THROWS_AS(growth_bound(BoundId::InfBeta, {3, 1.0, -6.0, 1.0, 0}), ParameterError);
    CHECK_THROWS_AS(growth_bound(BoundId::SupBetaPrime, {3, 1.0, 6.0, 2.0, 0}), ParameterError);
    CHECK_THROWS_AS(growth_bound(BoundId::SupGaussian, {1, 1.0, 6.0, 0, 0}), ParameterError);
    CHECK(parse_bound_id(to_string(BoundId::InfBetaPrime)) == BoundId::InfBetaPrime);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "nlcurv/errors.hpp"
#include "nlcurv/specfun.hpp"

using namespace nlcurv;
constexpr double pi = std::numbers::pi;

TEST_CASE("gamma fixed values") {
    CHECK(specfun::gamma(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(specfun::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-14));
    CHECK(specfun::gamma(0.5) == doctest::Approx(std::sqrt(pi)).epsilon(1e-14));
    CHECK(specfun::gamma(-0.5) == doctest::Approx(-2.0 * std::sqrt(pi)).epsilon(1e-13));
}

TEST_CASE("gamma poles throw") {
    CHECK_THROWS_AS(specfun::gamma(0.0), PoleError);
    CHECK_THROWS_AS(specfun::gamma(-1.0), PoleError);
    CHECK_THROWS_AS(specfun::gamma(-7.0), PoleError);
}

TEST_CASE("log_gamma consistency") {
    for (double x : {0.1, 0.7, 1.3, 4.5, 20.0, 100.0})
        CHECK(std::exp(specfun::log_gamma(x)) ==
              doctest::Approx(specfun::gamma(x)).epsilon(1e-12));
}

TEST_CASE("duplication identity") {
    for (int i = 0; i < 200; ++i) {
        double x = 0.05 + (20.0 - 0.05) * i / 199.0;
        double lhs = specfun::gamma(x) * specfun::gamma(x + 0.5);
        double rhs = std::pow(2.0, 1.0 - 2.0 * x) * std::sqrt(pi) * specfun::gamma(2.0 * x);
        CHECK(std::abs(lhs - rhs) / specfun::gamma(2.0 * x) <= 1e-12);
    }
}

TEST_CASE("reflection identity") {
    for (int i = 0; i < 200; ++i) {
        double x = -0.45 + 0.9 * (i + 0.5) / 200.0;
        double lhs = specfun::gamma(0.5 - x) * specfun::gamma(0.5 + x) * std::cos(pi * x);
        CHECK(std::abs(lhs - pi) / pi <= 1e-12);
    }
}

TEST_CASE("beta values and symmetry") {
    CHECK(specfun::beta(1.5, 2.5) == doctest::Approx(pi / 16.0).epsilon(1e-13));
    CHECK(specfun::beta(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    for (double x : {0.2, 1.1, 3.7})
        for (double y : {0.4, 2.3})
            CHECK(specfun::beta(x, y) == doctest::Approx(specfun::beta(y, x)).epsilon(1e-14));
}

TEST_CASE("sphere measure vs ball volume") {
    // surface of the unit (n-1)-sphere equals n times the unit n-ball volume;
    // stated per ambient dimension n in {2..6}
    for (int n = 2; n <= 6; ++n)
        CHECK(specfun::unit_sphere_measure(n - 2) ==
              doctest::Approx((n - 1) * specfun::unit_ball_volume(n - 1)).epsilon(1e-14));
    CHECK(specfun::unit_sphere_measure(0) == doctest::Approx(2.0));
    CHECK(specfun::unit_sphere_measure(1) == doctest::Approx(2.0 * pi).epsilon(1e-14));
    CHECK(specfun::unit_ball_volume(3) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-14));
}

TEST_CASE("normalization constants") {
    // mu positive on (0,1), nu negative on (0,2)
    for (double a : {0.1, 0.5, 0.9}) {
        CHECK(specfun::mu_alpha(a, 2) > 0.0);
        CHECK(specfun::mu_alpha(a, 3) > 0.0);
        CHECK(specfun::nu_alpha(a, 2) < 0.0);
    }
    for (double a : {1.2, 1.9}) CHECK(specfun::nu_alpha(a, 3) < 0.0);
}

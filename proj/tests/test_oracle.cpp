#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "nlcurv/errors.hpp"
#include "nlcurv/gridfield.hpp"
#include "nlcurv/oracle.hpp"

using namespace nlcurv;
constexpr double pi = std::numbers::pi;

TEST_CASE("sphere curvature fixed value") {
    CHECK(oracle::sphere_k(3, 0.5, 0.5) == doctest::Approx(-8.0).epsilon(1e-12));
}

TEST_CASE("sphere curvature classical limit") {
    double sigma = 1.0 - 1e-6;
    CHECK(std::abs((1.0 - sigma) * oracle::sphere_k(3, 1.0, sigma) - (-1.0)) <= 1e-4);
    CHECK(std::abs((1.0 - sigma) * oracle::sphere_k(2, 2.0, sigma) - (-0.5)) <= 1e-4);
}

TEST_CASE("sphere curvature monotone in radius") {
    for (double sigma : {0.25, 0.5, 0.75}) {
        double prev = std::abs(oracle::sphere_k(3, 0.25, sigma));
        for (double rho : {0.5, 1.0, 2.0, 4.0}) {
            double cur = std::abs(oracle::sphere_k(3, rho, sigma));
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("sphere tensor is k times identity") {
    auto L = oracle::sphere_L(3, 1.0, 0.5);
    double k = oracle::sphere_k(3, 1.0, 0.5);
    CHECK(L.rows() == 2);
    CHECK(L(0, 0) == doctest::Approx(k));
    CHECK(L(1, 1) == doctest::Approx(k));
    CHECK(L(0, 1) == 0.0);
}

TEST_CASE("sphere chart geometry") {
    Vec z(1.0, 0.0, 0.0), e(0.0, 1.0, 0.0), n(1.0, 0.0, 0.0);
    double rho = 1.0;
    for (double r : {0.1, 0.5, 1.0, 1.9}) {
        auto cp = oracle::sphere_geometry(r, rho, z, e, n);
        CHECK((cp.p - z).norm() == doctest::Approx(r).epsilon(1e-12));
        Vec center = z - n * rho; // curvature side is -n
        CHECK((cp.p - center).norm() == doctest::Approx(rho).epsilon(1e-12));
    }
    auto tiny = oracle::sphere_geometry(1e-8 * 2.0 * rho, rho, z, e, n);
    CHECK(std::abs(tiny.phi - pi / 2.0) <= 1e-7);
}

namespace {
GridField mode_field(int N, double L, int k) {
    return GridField::sample(2, N, L, 1, {DecayClass::compact, 0.0},
                             [&](const Vec& x, double* o) {
                                 o[0] = std::sin(2 * pi * k * x[0] / L) *
                                        std::sin(2 * pi * k * x[1] / L);
                             });
}
} // namespace

TEST_CASE("spectral operator is diagonal on lattice modes") {
    int N = 32, k = 3;
    double L = 8.0, alpha = 0.7;
    auto f = mode_field(N, L, k);
    auto g = oracle::spectral_frac_op(f, oracle::SpectralSymbol::laplacian, alpha);
    double lam = std::pow(2 * pi * k / L * std::sqrt(2.0), alpha);
    for (std::size_t i = 0; i < f.nodes(); ++i)
        CHECK(std::abs(g.at(i, 0) - lam * f.at(i, 0)) <= 1e-12 * lam);
}

TEST_CASE("spectral composition identity") {
    // the multipliers compose additively in the order; mode fields keep their
    // zero boundary under the scalar operator, so they can be re-fed
    int N = 32, k = 2;
    double L = 8.0;
    auto f = mode_field(N, L, k);
    auto g = oracle::spectral_frac_op(f, oracle::SpectralSymbol::laplacian, 0.4);
    auto gg = oracle::spectral_frac_op(g, oracle::SpectralSymbol::laplacian, 0.3);
    auto lap = oracle::spectral_frac_op(f, oracle::SpectralSymbol::laplacian, 0.7);
    double scale = lap.max_abs();
    for (std::size_t i = 0; i < f.nodes(); ++i)
        CHECK(std::abs(gg.at(i, 0) - lap.at(i, 0)) <= 1e-12 * scale);
}

TEST_CASE("fat-tailed operator output cannot be re-fed") {
    // fractional gradients of rapidly decaying inputs have algebraic tails,
    // so chaining vector-valued spectral ops trips the periodization guard
    auto f = GridField::sample(2, 32, 16.0, 1, {DecayClass::gaussian, 0.0},
                               [](const Vec& x, double* o) {
                                   o[0] = std::exp(-x.squared_norm());
                               });
    auto g = oracle::spectral_frac_op(f, oracle::SpectralSymbol::gradient, 0.4);
    CHECK_THROWS_AS(oracle::spectral_frac_op(g, oracle::SpectralSymbol::divergence, 0.3),
                    PeriodizationError);
}

TEST_CASE("visibly nonperiodic fields are rejected") {
    auto f = GridField::sample(2, 32, 8.0, 1, {DecayClass::gaussian, 0.0},
                               [](const Vec& x, double* o) { o[0] = x[0]; });
    CHECK_THROWS_AS(oracle::spectral_frac_op(f, oracle::SpectralSymbol::laplacian, 0.5),
                    PeriodizationError);
    auto slow = GridField::sample(2, 32, 8.0, 1, {DecayClass::algebraic, 3.0},
                                  [](const Vec& x, double* o) {
                                      o[0] = 1.0 / (1.0 + x.squared_norm());
                                  });
    CHECK_THROWS_AS(oracle::spectral_frac_op(slow, oracle::SpectralSymbol::laplacian, 0.5),
                    PeriodizationError);
}

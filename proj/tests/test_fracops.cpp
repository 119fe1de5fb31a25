#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "nlcurv/errors.hpp"
#include "nlcurv/fracops.hpp"
#include "nlcurv/gridfield.hpp"
#include "nlcurv/oracle.hpp"
#include "nlcurv/specfun.hpp"

using namespace nlcurv;
constexpr double pi = std::numbers::pi;

namespace {
GridField gaussian2(int N, double L) {
    return GridField::sample(2, N, L, 1, {DecayClass::gaussian, 0.0},
                             [](const Vec& x, double* o) {
                                 o[0] = std::exp(-0.5 * x.squared_norm());
                             });
}
} // namespace

TEST_CASE("constants are annihilated") {
    auto c = GridField::sample(2, 32, 8.0, 1, {DecayClass::compact, 0.0},
                               [](const Vec&, double* o) { o[0] = 3.7; });
    CHECK(fracops::frac_laplacian(c, 0.6).max_abs() <= 1e-12);
    CHECK(fracops::frac_gradient(c, 0.4).max_abs() <= 1e-12);
}

TEST_CASE("translation equivariance on the lattice") {
    int N = 64;
    double L = 16.0, alpha = 0.6;
    auto f = gaussian2(N, L);
    auto fs = GridField::sample(2, N, L, 1, {DecayClass::gaussian, 0.0},
                                [&](const Vec& x, double* o) {
                                    Vec y(x[0] - 3 * f.h(), x[1] + 2 * f.h());
                                    o[0] = std::exp(-0.5 * y.squared_norm());
                                });
    auto a = fracops::frac_laplacian(f, alpha);
    auto b = fracops::frac_laplacian(fs, alpha);
    double worst = 0.0;
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) {
            int is = (i + 3) % N, js = (j + N - 2) % N;
            worst = std::max(worst, std::abs(b.at(fs.idx(is, js, 0), 0) -
                                             a.at(f.idx(i, j, 0), 0)));
        }
    CHECK(worst <= 1e-9);
}

TEST_CASE("laplacian matches the spectral oracle") {
    auto f = gaussian2(64, 16.0);
    auto lat = fracops::frac_laplacian(f, 0.6);
    auto spec = oracle::spectral_frac_op(f, oracle::SpectralSymbol::laplacian, 0.6);
    CHECK(l2_relative_error(lat, spec) <= 1e-3);
}

TEST_CASE("gradient trace is the divergence") {
    int N = 48;
    double L = 12.0, alpha = 0.4;
    auto w = GridField::sample(2, N, L, 2, {DecayClass::gaussian, 0.0},
                               [](const Vec& x, double* o) {
                                   double g = std::exp(-0.5 * x.squared_norm());
                                   o[0] = x[1] * g;
                                   o[1] = x[0] * g;
                               });
    auto d = fracops::frac_divergence(w, alpha);
    GridField c0{2, N, L, 1, w.decay, {}}, c1 = c0;
    c0.data.resize(w.nodes());
    c1.data.resize(w.nodes());
    for (std::size_t i = 0; i < w.nodes(); ++i) c0.data[i] = w.at(i, 0), c1.data[i] = w.at(i, 1);
    auto g0 = fracops::frac_gradient(c0, alpha);
    auto g1 = fracops::frac_gradient(c1, alpha);
    for (std::size_t i = 0; i < w.nodes(); ++i)
        CHECK(std::abs(g0.at(i, 0) + g1.at(i, 1) - d.at(i, 0)) <= 1e-12);
}

TEST_CASE("hessian trace is minus the laplacian") {
    auto f = gaussian2(48, 12.0);
    auto hd = fracops::frac_hessian_direct(f, 0.3, 0.3);
    auto lap = fracops::frac_laplacian(f, 0.6);
    double scale = lap.max_abs();
    for (std::size_t i = 0; i < f.nodes(); ++i)
        CHECK(std::abs(hd.at(i, 0) + hd.at(i, 3) + lap.at(i, 0)) <= 1e-10 * scale);
}

TEST_CASE("slow algebraic decay is rejected") {
    auto slow = GridField::sample(2, 32, 8.0, 1, {DecayClass::algebraic, 3.0},
                                  [](const Vec& x, double* o) {
                                      o[0] = 1.0 / (1.0 + x.squared_norm());
                                  });
    CHECK_THROWS_AS(fracops::frac_laplacian(slow, 0.5), UnsupportedDecay);
}

TEST_CASE("closed-form hessian kernel") {
    Vec v(0.8, -0.6);
    auto K = fracops::frac_kernel_tensor(v, 0.3, 0.5);
    double s = 0.8;
    // trace is minus the scalar kernel of order s
    double scalar = -specfun::nu_alpha(s, 2) * std::pow(v.norm(), -2.0 - s);
    CHECK(K.trace() == doctest::Approx(scalar).epsilon(1e-12));
    // eigenvector along v
    Eigen::Vector2d vv(v[0] / v.norm(), v[1] / v.norm());
    Eigen::Vector2d Kv = K * vv;
    CHECK((Kv - (vv.dot(Kv)) * vv).norm() <= 1e-12 * K.norm());
}

TEST_CASE("gauss-weierstrass prefactor identity") {
    // the two equivalent prefactor forms coincide
    for (int n : {1, 2, 3})
        for (double a : {0.3, 0.5, 0.8})
            CHECK(fracops::gw_prefactor(n, a) ==
                  doctest::Approx(1.0 / (2.0 * specfun::mu_alpha(a, n) *
                                         specfun::gamma((1.0 - a) / 2.0)))
                      .epsilon(1e-13));
}

TEST_CASE("gauss-weierstrass subordination") {
    // unit vector, n = 2, alpha = 0.5: the closed form is exactly 1
    auto r = fracops::gw_subordination_check(0.5, Vec(1.0, 0.0));
    CHECK(r.closed_form == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(r.numeric - r.closed_form) <= 1e-8);
    // scaling exponent -(n + alpha + 1) from a log-log fit
    double a = 0.5;
    std::vector<double> lr, lv;
    for (double u : {0.5, 1.0, 2.0, 4.0}) {
        auto s = fracops::gw_subordination_check(a, Vec(u, 0.0));
        lr.push_back(std::log(u));
        lv.push_back(std::log(s.numeric));
    }
    double slope = (lv.back() - lv.front()) / (lr.back() - lr.front());
    CHECK(std::abs(slope - (-(2.0 + a + 1.0))) <= 1e-3);
}

TEST_CASE("mollified ball classifier reproduces the mean curvature") {
    // L chosen so the sphere radius lands exactly on a lattice node; the
    // relation is evaluated at a surface point
    int N = 256;
    double L = 16.0, rho = 1.0, sigma = 0.5;
    auto g = fracops::ball_indicator_field(2, N, L, rho);
    auto lap = fracops::frac_laplacian(g, sigma);
    int i = static_cast<int>(std::lround((rho + L / 2) / g.h()));
    int j = N / 2;
    double got = lap.at(g.idx(i, j, 0), 0);
    double want = specfun::nu_alpha(sigma, 2) * specfun::unit_sphere_measure(0) *
                  oracle::sphere_k(2, rho, sigma);
    CHECK(std::abs(got - want) / std::abs(want) <= 0.05);
}

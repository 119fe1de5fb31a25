#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nlcurv/curvature.hpp"
#include "nlcurv/oracle.hpp"
#include "nlcurv/quadrature.hpp"
#include "nlcurv/surface.hpp"

using namespace nlcurv;

TEST_CASE("radial pv closed forms") {
    double sigma = 0.6, rmax = 50.0;
    { // constant sign with analytic tail: finite part vanishes
        RadialPiecewise rp{1, {}, sigma};
        auto pv = radial_pv(rp, 1.0, rmax, QuadratureSpec::Tail::analytic);
        CHECK(pv.divergence_coeff == doctest::Approx(1.0 / sigma).epsilon(1e-14));
        CHECK(std::abs(pv.finite_part) <= 1e-14);
    }
    { // one sign flip at r = a
        double a = 2.0;
        RadialPiecewise rp{1, {a}, sigma};
        auto pv = radial_pv(rp, 1.0, rmax, QuadratureSpec::Tail::analytic);
        CHECK(pv.finite_part ==
              doctest::Approx(-2.0 * std::pow(a, -sigma) / sigma).epsilon(1e-13));
        CHECK(pv.divergence_coeff == doctest::Approx(1.0 / sigma).epsilon(1e-14));
    }
    { // truncated tail differs by the cut remainder
        RadialPiecewise rp{1, {}, sigma};
        auto an = radial_pv(rp, 1.0, rmax, QuadratureSpec::Tail::analytic);
        auto tr = radial_pv(rp, 1.0, rmax, QuadratureSpec::Tail::truncate);
        CHECK(an.finite_part - tr.finite_part ==
              doctest::Approx(std::pow(rmax, -sigma) / sigma).epsilon(1e-12));
    }
}

TEST_CASE("angular nodes are positive and symmetric about pi/2") {
    auto nodes = angular_nodes(64);
    CHECK(!nodes.empty());
    for (const auto& nd : nodes) {
        CHECK(nd.weight > 0.0);
        CHECK(nd.delta > 0.0);
        CHECK(nd.delta < std::numbers::pi / 2.0);
    }
}

TEST_CASE("halfplane integral matches brute force and the closed form") {
    SphereScene s(Vec(0, 0, 0), 1.0);
    Vec z(1, 0, 0);
    auto frame = tangent_frame(s, z);
    QuadratureSpec spec;
    double sigma = 0.5;
    double want = oracle::sphere_k(3, 1.0, sigma);
    QuadDiagnostics diag;
    double k = halfplane_pv_integral(s, z, frame, frame.tangent[0], sigma, spec, &diag);
    CHECK(std::abs(k - want) / std::abs(want) <= 1e-10);
    CHECK(diag.n_nodes > 0);
    double kb = halfplane_pv_bruteforce(s, z, frame, frame.tangent[0], sigma, spec);
    CHECK(std::abs(kb - want) / std::abs(want) <= 1e-4);
}

TEST_CASE("angular refinement improves the torus value") {
    auto t = make_implicit_scene("torus", {2.0, 0.7});
    Vec z(2.7, 0, 0);
    auto frame = tangent_frame(*t, z);
    QuadratureSpec coarse, fine, finest;
    coarse.n_phi = 32;
    fine.n_phi = 128;
    finest.n_phi = 512;
    double sigma = 0.5;
    double kc = halfplane_pv_integral(*t, z, frame, frame.tangent[0], sigma, coarse);
    double kf = halfplane_pv_integral(*t, z, frame, frame.tangent[0], sigma, fine);
    double kk = halfplane_pv_integral(*t, z, frame, frame.tangent[0], sigma, finest);
    CHECK(std::abs(kf - kk) <= std::abs(kc - kk) + 1e-13);
}

TEST_CASE("monte carlo determinism and seeding") {
    QuadratureSpec spec;
    spec.mc_samples = 100'000;
    auto ball = [](double r) { return [r](const Vec& x) { return x.norm() < r; }; };
    Box box{Vec(-2, -2, -2), Vec(2, 2, 2)};
    auto a = sigma_perimeter(ball(1.0), ball(2.0), 0.5, box, spec);
    auto b = sigma_perimeter(ball(1.0), ball(2.0), 0.5, box, spec);
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_error == b.std_error);
    spec.rng_seed += 1;
    auto c = sigma_perimeter(ball(1.0), ball(2.0), 0.5, box, spec);
    CHECK(a.estimate != c.estimate);
    CHECK(a.std_error > 0.0);
    // batching may round the count down slightly
    CHECK(a.samples > 99'000);
    CHECK(a.samples <= 100'000);
}

TEST_CASE("area and perimeter estimators agree loosely at small budget") {
    QuadratureSpec spec;
    spec.mc_samples = 200'000;
    auto ball = [](double r) { return [r](const Vec& x) { return x.norm() < r; }; };
    Box box{Vec(-2, -2, -2), Vec(2, 2, 2)};
    SphereScene s(Vec(0, 0, 0), 1.0);
    auto area = sigma_area(s, ball(2.0), 0.5, box, spec);
    auto per = sigma_perimeter(ball(1.0), ball(2.0), 0.5, box, spec);
    double se = std::hypot(area.std_error, per.std_error);
    CHECK(std::abs(area.estimate - per.estimate) <= 5.0 * se);
}

TEST_CASE("surface integral recovers mesh area") {
    TriMeshScene s(make_icosphere(1.0, 4));
    Vec z = s.mesh().vertices[0];
    Vec nz = s.orientation_normal(z);
    QuadratureSpec spec;
    double acc = 0.0;
    surface_integral(s, z, nz, 1,
                     [](const Vec&, const Vec&, double w, double* a) { a[0] += w; }, spec,
                     &acc);
    // curved-patch quadrature converges to the smooth sphere area, which the
    // flat-facet sum slightly undershoots
    CHECK(std::abs(acc) == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-3));
}

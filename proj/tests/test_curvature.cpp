#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nlcurv/curvature.hpp"
#include "nlcurv/errors.hpp"
#include "nlcurv/oracle.hpp"
#include "nlcurv/surface.hpp"

using namespace nlcurv;

TEST_CASE("sphere directional curvature vs closed form") {
    QuadratureSpec spec;
    for (double sigma : {0.25, 0.75}) {
        SphereScene s(Vec(0, 0, 0), 1.0);
        Vec z(1, 0, 0);
        auto frame = tangent_frame(s, z);
        double k = directional_curvature(s, z, frame.tangent[0], sigma, spec);
        double want = oracle::sphere_k(3, 1.0, sigma);
        CHECK(std::abs(k - want) / std::abs(want) <= 1e-3);
    }
}

TEST_CASE("plane is flat") {
    PlaneScene p(Vec(0, 0, 0), Vec(0, 0, 1));
    QuadratureSpec spec;
    auto rep = curvature_report(p, Vec(0.3, -0.2, 0.0), 0.5, spec);
    for (double k : rep.samples.k) CHECK(std::abs(k) <= 1e-12);
    CHECK(std::abs(rep.H_volume) <= 1e-12);
    CHECK(std::abs(rep.H_avg) <= 1e-12);
    CHECK(rep.L.m.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("radius scaling") {
    QuadratureSpec spec;
    double sigma = 0.5;
    Vec e;
    double k1, k2;
    {
        SphereScene s(Vec(0, 0, 0), 1.0);
        auto fr = tangent_frame(s, Vec(1, 0, 0));
        k1 = directional_curvature(s, Vec(1, 0, 0), fr.tangent[0], sigma, spec);
    }
    {
        SphereScene s(Vec(0, 0, 0), 2.0);
        auto fr = tangent_frame(s, Vec(2, 0, 0));
        k2 = directional_curvature(s, Vec(2, 0, 0), fr.tangent[0], sigma, spec);
    }
    CHECK(k2 == doctest::Approx(k1 * std::pow(2.0, -sigma)).epsilon(1e-9));
}

TEST_CASE("isometry invariance on the sphere") {
    QuadratureSpec spec;
    SphereScene s(Vec(0, 0, 0), 1.0);
    double sigma = 0.5;
    auto fa = tangent_frame(s, Vec(1, 0, 0));
    auto fb = tangent_frame(s, Vec(0, 0, 1));
    double ka = directional_curvature(s, Vec(1, 0, 0), fa.tangent[0], sigma, spec);
    double kb = directional_curvature(s, Vec(0, 0, 1), fb.tangent[0], sigma, spec);
    CHECK(ka == doctest::Approx(kb).epsilon(1e-10));
}

TEST_CASE("report identities on a bump graph") {
    auto g = make_implicit_scene("graph:bump", {1.0});
    Vec z = g->project_to_surface(Vec(0.4, 0.1, 1.0));
    QuadratureSpec spec;
    auto rep = curvature_report(*g, z, 0.5, spec);
    CHECK(rep.trace_residual <= 1e-10 * std::abs(rep.H_avg));
    CHECK(std::abs(rep.H_volume - rep.H_avg) <= 1e-2 * std::abs(rep.H_avg));
    CHECK(rep.K == doctest::Approx(rep.L.det()).epsilon(1e-12));
    CHECK(rep.L.sym_residual <= 1e-8 * rep.L.m.norm());
}

TEST_CASE("torus mesh vs implicit surface") {
    QuadratureSpec spec;
    double sigma = 0.5;
    auto imp = make_implicit_scene("torus", {2.0, 0.7});
    Vec z(2.7, 0, 0);
    auto rep = curvature_report(*imp, z, sigma, spec);
    TriMeshScene mesh(make_torus_mesh(2.0, 0.7, 192, 96));
    Vec zm = mesh.project_to_surface(z);
    double Hm = mean_curvature_surface(mesh, zm, sigma, spec);
    CHECK(std::abs(Hm - rep.H_avg) / std::abs(rep.H_avg) <= 5e-2);
}

TEST_CASE("limit extrapolation on synthetic data") {
    // value = c / (1 - sigma): (1 - sigma) * value is exactly c
    std::vector<std::pair<double, double>> vals;
    for (double s : {0.9, 0.95, 0.99}) vals.emplace_back(s, -2.0 / (1.0 - s));
    auto lim = sigma_to_one_limit(vals);
    CHECK(lim.value == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK_THROWS_AS(sigma_to_one_limit({{0.9, 1.0}}), ConfigError);
    // wildly inconsistent data must not silently extrapolate
    CHECK_THROWS_AS(sigma_to_one_limit({{0.9, 10.0}, {0.95, -3.0}, {0.99, 200.0}}),
                    NonConvergent);
}

TEST_CASE("tensor representation equivalence on the sphere") {
    QuadratureSpec spec;
    SphereScene s(Vec(0, 0, 0), 1.0);
    Vec z(1, 0, 0);
    auto La = curvature_tensor(s, z, 0.5, spec, TensorRepresentation::angular);
    auto Lf = curvature_tensor(s, z, 0.5, spec, TensorRepresentation::fullspace);
    CHECK((La.m - Lf.m).cwiseAbs().maxCoeff() <= 1e-2 * La.m.norm());
    CHECK_THROWS_AS(curvature_tensor(s, z, 0.5, spec, TensorRepresentation::surface),
                    RepresentationUnavailable);
}

TEST_CASE("ambient tensor annihilates the normal") {
    QuadratureSpec spec;
    SphereScene s(Vec(0, 0, 0), 1.0);
    Vec z = s.project_to_surface(Vec(1.0, 0.7, -0.3));
    auto L = curvature_tensor(s, z, 0.5, spec, TensorRepresentation::angular);
    auto A = L.ambient(3);
    Eigen::Vector3d n(L.frame.normal[0], L.frame.normal[1], L.frame.normal[2]);
    CHECK((A * n).norm() <= 1e-12 * A.norm());
    CHECK(A.trace() == doctest::Approx(L.trace()).epsilon(1e-12));
}

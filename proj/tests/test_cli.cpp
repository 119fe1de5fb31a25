#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "runner.hpp"
#include "nlcurv/errors.hpp"

using namespace nlcurv;
using namespace nlcurv::cli;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}
} // namespace

TEST_CASE("config round-trips through json") {
    auto j = nlohmann::json::parse(R"({
        "scene": "torus:R=2,r=0.7",
        "points": [[2.7, 0.0, 0.0], [1.3, 0.0, 0.0]],
        "sigmas": [0.25, 0.5],
        "representation": "fullspace",
        "extrapolate": false,
        "reproducible": true,
        "quadrature": {"n_phi": 256, "rng_seed": 42}
    })");
    auto cfg = config_from_json(j);
    CHECK(cfg.scene == "torus:R=2,r=0.7");
    CHECK(cfg.points.size() == 2);
    CHECK(cfg.quad.n_phi == 256);
    CHECK(cfg.quad.rng_seed == 42);
    auto out = config_to_json(cfg);
    auto cfg2 = config_from_json(out);
    CHECK(config_to_json(cfg2).dump() == out.dump());
}

TEST_CASE("config validation errors name the field") {
    RunConfig c;
    c.points.push_back(Vec(1, 0, 0));
    c.sigmas = {1.5};
    CHECK_THROWS_WITH_AS(validate_config(c), doctest::Contains("sigmas"), ConfigError);
    c.sigmas = {};
    CHECK_THROWS_WITH_AS(validate_config(c), doctest::Contains("sigmas"), ConfigError);
    c.sigmas = {0.5};
    c.representation = "sideways";
    CHECK_THROWS_WITH_AS(validate_config(c), doctest::Contains("representation"), ConfigError);
    c.representation = "angular";
    c.points.clear();
    CHECK_THROWS_WITH_AS(validate_config(c), doctest::Contains("points"), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"not_a_field", 1}}), ConfigError);
}

TEST_CASE("scene spec parsing") {
    CHECK(make_scene("sphere:r=0.5")->dim() == 3);
    CHECK(make_scene("circle:r=2")->dim() == 2);
    CHECK(make_scene("plane")->dim() == 3);
    CHECK(make_scene("torus:R=2,r=0.7")->dim() == 3);
    CHECK(make_scene("graph:bump:a=1")->dim() == 3);
    CHECK(make_scene("icosphere:r=1,level=2")->dim() == 3);
    CHECK(make_scene("torus-mesh:R=2,r=0.5,nu=32,nv=16")->dim() == 3);
    CHECK_THROWS_AS(make_scene("klein-bottle"), ConfigError);
    CHECK_THROWS_AS(make_scene("sphere:radius=1"), ConfigError);
    CHECK_THROWS_AS(make_scene("sphere:r=abc"), ConfigError);
    CHECK_THROWS_AS(make_scene("mesh"), ConfigError);
}

TEST_CASE("points end up on the surface") {
    auto scene = make_scene("sphere:r=2");
    RunConfig c;
    c.points.push_back(Vec(5.0, 0.0, 1.0));
    for (const auto& p : resolve_points(*scene, c))
        CHECK(scene->surface_distance(p) <= scene->on_surface_tolerance());
    RunConfig g;
    g.grid_on_surface = 40;
    auto pts = resolve_points(*scene, g);
    CHECK(pts.size() == 40);
    for (const auto& p : pts)
        CHECK(scene->surface_distance(p) <= scene->on_surface_tolerance());
    RunConfig bad;
    bad.points.push_back(Vec(1.0, 0.0));
    CHECK_THROWS_AS(resolve_points(*scene, bad), ConfigError);
}

TEST_CASE("curvature run emits the sphere value and is byte-reproducible") {
    RunConfig c;
    c.scene = "sphere:r=0.5";
    c.points.push_back(Vec(0.5, 0, 0));
    c.sigmas = {0.5};
    c.reproducible = true;
    c.quad.n_dir = 8;
    std::ostringstream errs;

    c.output_csv = "cli_run_a.csv";
    CHECK(run_curvature(c, errs) == 0);
    c.output_csv = "cli_run_b.csv";
    CHECK(run_curvature(c, errs) == 0);
    auto a = slurp("cli_run_a.csv");
    CHECK(a == slurp("cli_run_b.csv"));
    CHECK(a.find("-8.000000000000") != std::string::npos);
    CHECK(a.find("kind") != std::string::npos);
    CHECK(errs.str().empty());
    std::remove("cli_run_a.csv");
    std::remove("cli_run_b.csv");
}

TEST_CASE("extrapolated limit rows") {
    RunConfig c;
    c.scene = "sphere:r=1";
    c.points.push_back(Vec(1, 0, 0));
    c.sigmas = {0.9, 0.95, 0.99};
    c.extrapolate = true;
    c.reproducible = true;
    c.quad.n_dir = 8;
    c.output_csv = "cli_run_lim.csv";
    std::ostringstream errs;
    CHECK(run_curvature(c, errs) == 0);
    auto csv = slurp("cli_run_lim.csv");
    auto pos = csv.find(",limit");
    REQUIRE(pos != std::string::npos);
    auto line_start = csv.rfind('\n', pos);
    auto line = csv.substr(line_start + 1, pos - line_start);
    // k column of the limit row is close to -1/rho = -1
    CHECK(line.find(",-0.99") != std::string::npos);
    std::remove("cli_run_lim.csv");
}

#include "config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>

#include "nlcurv/errors.hpp"
#include "nlcurv/mesh.hpp"

namespace nlcurv::cli {
namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        auto next = s.find(sep, pos);
        out.push_back(s.substr(pos, next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

std::map<std::string, double> parse_kv(const std::string& s, const std::string& where) {
    std::map<std::string, double> out;
    if (s.empty()) return out;
    for (const auto& item : split(s, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("scene '" + where + "': expected key=value, got '" + item + "'");
        try {
            out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw ConfigError("scene '" + where + "': bad number in '" + item + "'");
        }
    }
    return out;
}

double take(std::map<std::string, double>& kv, const std::string& key, double def) {
    auto it = kv.find(key);
    if (it == kv.end()) return def;
    double v = it->second;
    kv.erase(it);
    return v;
}

void expect_empty(const std::map<std::string, double>& kv, const std::string& where) {
    if (!kv.empty())
        throw ConfigError("scene '" + where + "': unknown parameter '" + kv.begin()->first +
                          "'");
}

json quad_to_json(const QuadratureSpec& q) {
    return json{{"eps_cutoff", q.eps_cutoff},
                {"r_max", q.r_max},
                {"n_phi", q.n_phi},
                {"n_dir", q.n_dir},
                {"mc_samples", q.mc_samples},
                {"rng_seed", q.rng_seed},
                {"tail", q.tail == QuadratureSpec::Tail::analytic ? "analytic" : "truncate"}};
}

QuadratureSpec quad_from_json(const json& j) {
    QuadratureSpec q;
    for (const auto& [key, val] : j.items()) {
        try {
            if (key == "eps_cutoff") q.eps_cutoff = val.get<double>();
            else if (key == "r_max") q.r_max = val.get<double>();
            else if (key == "n_phi") q.n_phi = val.get<int>();
            else if (key == "n_dir") q.n_dir = val.get<int>();
            else if (key == "mc_samples") q.mc_samples = val.get<long long>();
            else if (key == "rng_seed") q.rng_seed = val.get<uint64_t>();
            else if (key == "tail") {
                auto s = val.get<std::string>();
                if (s == "analytic") q.tail = QuadratureSpec::Tail::analytic;
                else if (s == "truncate") q.tail = QuadratureSpec::Tail::truncate;
                else throw ConfigError("quadrature.tail: expected analytic or truncate");
            } else {
                throw ConfigError("quadrature: unknown field '" + key + "'");
            }
        } catch (const json::exception& e) {
            throw ConfigError("quadrature." + key + ": " + e.what());
        }
    }
    return q;
}

Vec vec_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() < 2 || j.size() > 3)
        throw ConfigError(where + ": expected an array of 2 or 3 numbers");
    if (j.size() == 2) return Vec(j[0].get<double>(), j[1].get<double>());
    return Vec(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.n; ++i) a.push_back(v[i]);
    return a;
}

} // namespace

RunConfig config_from_json(const json& j) {
    RunConfig c;
    for (const auto& [key, val] : j.items()) {
        try {
            if (key == "scene") c.scene = val.get<std::string>();
            else if (key == "points") {
                c.points.clear();
                for (const auto& p : val) c.points.push_back(vec_from_json(p, "points"));
            } else if (key == "grid_on_surface") c.grid_on_surface = val.get<int>();
            else if (key == "sigmas") c.sigmas = val.get<std::vector<double>>();
            else if (key == "representation") c.representation = val.get<std::string>();
            else if (key == "extrapolate") c.extrapolate = val.get<bool>();
            else if (key == "reproducible") c.reproducible = val.get<bool>();
            else if (key == "quadrature") c.quad = quad_from_json(val);
            else if (key == "output_csv") c.output_csv = val.get<std::string>();
            else if (key == "output_json") c.output_json = val.get<std::string>();
            else throw ConfigError("unknown config field '" + key + "'");
        } catch (const json::exception& e) {
            throw ConfigError("config field '" + key + "': " + e.what());
        }
    }
    return c;
}

json config_to_json(const RunConfig& c) {
    json points = json::array();
    for (const auto& p : c.points) points.push_back(vec_to_json(p));
    return json{{"scene", c.scene},
                {"points", points},
                {"grid_on_surface", c.grid_on_surface},
                {"sigmas", c.sigmas},
                {"representation", c.representation},
                {"extrapolate", c.extrapolate},
                {"reproducible", c.reproducible},
                {"quadrature", quad_to_json(c.quad)},
                {"output_csv", c.output_csv},
                {"output_json", c.output_json}};
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

void validate_config(const RunConfig& c) {
    if (c.sigmas.empty()) throw ConfigError("sigmas: at least one value required");
    for (double s : c.sigmas)
        if (!(s > 0.0 && s < 1.0))
            throw ConfigError("sigmas: values must lie in (0,1), got " + std::to_string(s));
    if (c.grid_on_surface < 0) throw ConfigError("grid_on_surface: must be >= 0");
    if (c.points.empty() && c.grid_on_surface == 0)
        throw ConfigError("points: give explicit points or grid_on_surface > 0");
    if (c.representation != "angular" && c.representation != "fullspace" &&
        c.representation != "surface")
        throw ConfigError("representation: expected angular, fullspace or surface");
    if (c.extrapolate && c.sigmas.size() < 2)
        throw ConfigError("extrapolate: needs at least two sigma values");
}

std::shared_ptr<Scene> make_scene(const std::string& spec) {
    auto parts = split(spec, ':');
    const std::string& name = parts[0];
    if (name == "mesh") {
        if (parts.size() < 2 || parts[1].empty())
            throw ConfigError("scene 'mesh': expected mesh:<path>");
        return std::make_shared<TriMeshScene>(load_mesh(spec.substr(5)));
    }
    std::string catalog = name;
    std::string kv_str;
    if (name == "graph") {
        if (parts.size() < 2)
            throw ConfigError("scene 'graph': expected graph:<paraboloid|saddle|bump>[:a=..]");
        catalog = "graph:" + parts[1];
        kv_str = parts.size() > 2 ? parts[2] : "";
    } else {
        kv_str = parts.size() > 1 ? parts[1] : "";
    }
    auto kv = parse_kv(kv_str, spec);

    if (catalog == "sphere") {
        double r = take(kv, "r", 1.0);
        expect_empty(kv, spec);
        return std::make_shared<SphereScene>(Vec(0, 0, 0), r);
    }
    if (catalog == "circle") {
        double r = take(kv, "r", 1.0);
        expect_empty(kv, spec);
        return std::make_shared<SphereScene>(Vec(0, 0), r);
    }
    if (catalog == "plane") {
        expect_empty(kv, spec);
        return std::make_shared<PlaneScene>(Vec(0, 0, 0), Vec(0, 0, 1));
    }
    if (catalog == "torus") {
        double R = take(kv, "R", 2.0), r = take(kv, "r", 0.5);
        expect_empty(kv, spec);
        return make_implicit_scene("torus", {R, r});
    }
    if (catalog.starts_with("graph:")) {
        double a = take(kv, "a", 1.0);
        expect_empty(kv, spec);
        return make_implicit_scene(catalog, {a});
    }
    if (catalog == "icosphere") {
        double r = take(kv, "r", 1.0);
        int level = static_cast<int>(take(kv, "level", 4));
        expect_empty(kv, spec);
        return std::make_shared<TriMeshScene>(make_icosphere(r, level));
    }
    if (catalog == "torus-mesh") {
        double R = take(kv, "R", 2.0), r = take(kv, "r", 0.5);
        int nu = static_cast<int>(take(kv, "nu", 96));
        int nv = static_cast<int>(take(kv, "nv", 48));
        expect_empty(kv, spec);
        return std::make_shared<TriMeshScene>(make_torus_mesh(R, r, nu, nv));
    }
    throw ConfigError("unknown scene '" + spec + "'");
}

std::vector<Vec> resolve_points(const Scene& scene, const RunConfig& c) {
    const int n = scene.dim();
    std::vector<Vec> out;
    if (!c.points.empty()) {
        for (const auto& p : c.points) {
            if (p.n != n)
                throw ConfigError("points: dimension mismatch with the scene (" +
                                  std::to_string(p.n) + " vs " + std::to_string(n) + ")");
            out.push_back(scene.project_to_surface(p));
        }
        return out;
    }
    // Deterministic direction grid projected onto the surface: uniform angles
    // for curves, a Fibonacci spiral for surfaces.
    double rad = scene.crossing_bound(Vec::zero(n));
    if (!std::isfinite(rad)) rad = 1.0;
    const double pi = std::numbers::pi;
    for (int i = 0; i < c.grid_on_surface; ++i) {
        Vec d = Vec::zero(n);
        if (n == 2) {
            double th = 2.0 * pi * (i + 0.5) / c.grid_on_surface;
            d = Vec(std::cos(th), std::sin(th));
        } else {
            double z = 1.0 - 2.0 * (i + 0.5) / c.grid_on_surface;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double th = pi * (1.0 + std::sqrt(5.0)) * i;
            d = Vec(r * std::cos(th), r * std::sin(th), z);
        }
        out.push_back(scene.project_to_surface(d * rad));
    }
    return out;
}

} // namespace nlcurv::cli

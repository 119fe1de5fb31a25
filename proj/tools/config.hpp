#pragma once

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlcurv/quadrature.hpp"
#include "nlcurv/surface.hpp"
#include "nlcurv/vec.hpp"

namespace nlcurv::cli {

/// Full description of one curvature run. Serializes canonically to JSON so
/// that parse -> serialize -> parse is the identity.
struct RunConfig {
    std::string scene = "sphere:r=1";
    std::vector<Vec> points;      // explicit evaluation points (projected)
    int grid_on_surface = 0;      // >0: sample this many points instead
    std::vector<double> sigmas{0.5};
    std::string representation = "angular"; // angular | fullspace | surface
    bool extrapolate = false;
    bool reproducible = false;
    QuadratureSpec quad;
    std::string output_csv;  // empty: stdout
    std::string output_json; // empty: none
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
RunConfig load_config(const std::string& path);

/// Throws ConfigError naming the offending field.
void validate_config(const RunConfig& c);

/// Scene specs: "sphere:r=1", "circle:r=1", "plane", "torus:R=2,r=0.7",
/// "graph:bump:a=1" (also paraboloid, saddle), "icosphere:r=1,level=4",
/// "torus-mesh:R=2,r=0.7,nu=96,nv=48", "mesh:<path>".
std::shared_ptr<Scene> make_scene(const std::string& spec);

/// Explicit points projected to the surface, or a deterministic spiral-grid
/// sample of grid_on_surface points.
std::vector<Vec> resolve_points(const Scene& scene, const RunConfig& c);

} // namespace nlcurv::cli

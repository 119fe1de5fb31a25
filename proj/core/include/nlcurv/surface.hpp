#pragma once

#include <array>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "nlcurv/mesh.hpp"
#include "nlcurv/vec.hpp"

namespace nlcurv {

/// Sorted radii at which the ray z + t d crosses the surface, 0 < t <= t_max.
/// All listed crossings are transversal; near-tangential roots set the flag
/// instead (callers jitter or reject).
struct CrossingList {
    Vec z;
    Vec d;
    std::vector<double> t;
    bool tangential = false;
};

struct TangentFrame {
    Vec z;
    Vec normal;
    std::array<Vec, 2> tangent{}; // first dim()-1 entries valid
    int n_tangents = 0;
};

struct TangentProjection {
    Vec y_prime;  // z + P_{T_z S}(y - z)
    Vec e_hat;    // (y' - z)/|y' - z|
    double rho;   // |y' - z|
    double h;     // (y - z) . n(z)
};

/// Oriented (n-1)-surface in R^n answering ray-crossing and normal queries.
/// Immutable after construction; all queries are const and thread-safe.
class Scene {
public:
    virtual ~Scene() = default;

    virtual int dim() const = 0;
    virtual double scale() const = 0;

    /// Radius (from `from`) beyond which no ray crossing can occur.
    virtual double crossing_bound(const Vec& from) const = 0;

    virtual CrossingList crossings(const Vec& z, const Vec& d, double t_max) const = 0;

    /// Unit normal defining the orientation, evaluated at (a point near) S.
    virtual Vec orientation_normal(const Vec& z) const = 0;

    /// Distance from p to the surface (approximate for implicit scenes).
    virtual double surface_distance(const Vec& p) const = 0;

    virtual Vec project_to_surface(const Vec& p) const = 0;

    double on_surface_tolerance() const { return 1e-9 * scale(); }
    bool on_surface(const Vec& p) const { return surface_distance(p) <= 1e-6 * scale(); }
};

class SphereScene final : public Scene {
public:
    SphereScene(const Vec& center, double radius);

    int dim() const override { return center_.n; }
    double scale() const override { return radius_; }
    double crossing_bound(const Vec& from) const override;
    CrossingList crossings(const Vec& z, const Vec& d, double t_max) const override;
    Vec orientation_normal(const Vec& z) const override; // outward
    double surface_distance(const Vec& p) const override;
    Vec project_to_surface(const Vec& p) const override;

    const Vec& center() const { return center_; }
    double radius() const { return radius_; }

private:
    Vec center_;
    double radius_;
};

class PlaneScene final : public Scene {
public:
    PlaneScene(const Vec& point, const Vec& unit_normal);

    int dim() const override { return point_.n; }
    double scale() const override { return 1.0; }
    double crossing_bound(const Vec&) const override { return std::numeric_limits<double>::infinity(); }
    CrossingList crossings(const Vec& z, const Vec& d, double t_max) const override;
    Vec orientation_normal(const Vec&) const override { return normal_; }
    double surface_distance(const Vec& p) const override;
    Vec project_to_surface(const Vec& p) const override;

private:
    Vec point_;
    Vec normal_;
};

/// Level set {f = 0} oriented by grad f / |grad f|. Root isolation uses a
/// geometrically graded march near the base point followed by uniform steps
/// bounded by 0.05 * feature_scale, then bisection and Newton polish.
class ImplicitScene final : public Scene {
public:
    ImplicitScene(std::function<double(const Vec&)> f,
                  std::function<Vec(const Vec&)> grad,
                  int dim,
                  double feature_scale,
                  Vec bound_center,
                  double bound_radius);

    int dim() const override { return dim_; }
    double scale() const override { return feature_scale_; }
    double crossing_bound(const Vec& from) const override;
    CrossingList crossings(const Vec& z, const Vec& d, double t_max) const override;
    Vec orientation_normal(const Vec& z) const override;
    double surface_distance(const Vec& p) const override;
    Vec project_to_surface(const Vec& p) const override;

    double value(const Vec& p) const { return f_(p); }
    Vec gradient(const Vec& p) const { return grad_(p); }

private:
    std::function<double(const Vec&)> f_;
    std::function<Vec(const Vec&)> grad_;
    int dim_;
    double feature_scale_;
    Vec bound_center_;
    double bound_radius_;
};

/// Named implicit catalog: "sphere" (r), "plane", "torus" (R, r),
/// "graph:paraboloid" / "graph:saddle" / "graph:bump" (a) for z = g(x,y).
std::shared_ptr<Scene> make_implicit_scene(const std::string& name,
                                           const std::vector<double>& params);

class TriMeshScene final : public Scene {
public:
    explicit TriMeshScene(TriMesh mesh);
    ~TriMeshScene() override;

    int dim() const override { return 3; }
    double scale() const override { return scale_; }
    double crossing_bound(const Vec& from) const override;
    CrossingList crossings(const Vec& z, const Vec& d, double t_max) const override;
    Vec orientation_normal(const Vec& z) const override; // interpolated vertex normals
    double surface_distance(const Vec& p) const override;
    Vec project_to_surface(const Vec& p) const override;

    const TriMesh& mesh() const { return mesh_; }
    double mean_edge_length() const { return edge_len_; }

private:
    TriMesh mesh_;
    double scale_;
    double edge_len_;
    Vec bound_center_;
    double bound_radius_;
    struct Accel;
    std::unique_ptr<Accel> accel_;
};

/// Parity of the crossing count on the open segment (x, y).
/// Throws EndpointOnSurface / TangencyDetected.
bool segment_parity_odd(const Scene& scene, const Vec& x, const Vec& y);

/// The classifier chi_hat_S(z, y) in {-1, 0, +1} for z on S with normal n_z.
/// The crossing at z itself is excluded from the parity count.
int classify(const Scene& scene, const Vec& z, const Vec& n_z, const Vec& y);

/// Deterministic orthonormal tangent frame at z (throws PointNotOnSurface).
TangentFrame tangent_frame(const Scene& scene, const Vec& z);

/// Splits y - z into tangent and normal parts at z.
/// Throws DegenerateProjection when y lies on the normal line.
TangentProjection project_to_tangent(const Vec& z, const TangentFrame& frame, const Vec& y);

} // namespace nlcurv

#include "nlcurv/surface.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlcurv/errors.hpp"

namespace nlcurv {

namespace {

constexpr double kTangencyTol = 1e-8;

void sort_and_dedupe(std::vector<double>& ts, double tol) {
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end(),
                         [tol](double a, double b) { return b - a < tol; }),
             ts.end());
}

} // namespace

// ---------------------------------------------------------------- SphereScene

SphereScene::SphereScene(const Vec& center, double radius)
    : center_(center), radius_(radius) {
    if (radius <= 0.0) throw ConfigError("sphere radius must be positive");
}

double SphereScene::crossing_bound(const Vec& from) const {
    return (from - center_).norm() + radius_ * 1.001;
}

CrossingList SphereScene::crossings(const Vec& z, const Vec& d, double t_max) const {
    CrossingList out;
    out.z = z;
    out.d = d;
    const Vec w = z - center_;
    const double b = w.dot(d);
    const double c0 = w.squared_norm() - radius_ * radius_;
    if (std::abs(c0) <= 1e-12 * radius_ * radius_) {
        // Base point on the sphere to representation accuracy: the roots are
        // exactly {0, -2b}, valid down to arbitrarily grazing rays. This keeps
        // the deep angular nodes of the PV quadrature exact.
        double t1 = -2.0 * b;
        if (t1 > 0.0 && t1 <= t_max) out.t.push_back(t1);
        return out;
    }
    const double disc = b * b - c0;
    if (disc <= 0.0) return out;
    const double sq = std::sqrt(disc);
    // |d . n| at a root equals sqrt(disc)/radius: near-tangential lines are flagged.
    const bool grazing = sq < kTangencyTol * radius_;
    const double t_eps = 1e-9 * radius_;
    for (double t : {-b - sq, -b + sq}) {
        if (t > t_eps && t <= t_max) {
            if (grazing) {
                out.tangential = true;
            } else {
                out.t.push_back(t);
            }
        }
    }
    return out;
}

Vec SphereScene::orientation_normal(const Vec& z) const {
    return (z - center_).normalized();
}

double SphereScene::surface_distance(const Vec& p) const {
    return std::abs((p - center_).norm() - radius_);
}

Vec SphereScene::project_to_surface(const Vec& p) const {
    Vec w = p - center_;
    double m = w.norm();
    if (m == 0.0) w = Vec::axis(p.n, 0), m = 1.0;
    return center_ + w * (radius_ / m);
}

// ----------------------------------------------------------------- PlaneScene

PlaneScene::PlaneScene(const Vec& point, const Vec& unit_normal)
    : point_(point), normal_(unit_normal) {
    if (std::abs(normal_.norm() - 1.0) > 1e-12) normal_ = normal_.normalized();
}

CrossingList PlaneScene::crossings(const Vec& z, const Vec& d, double t_max) const {
    CrossingList out;
    out.z = z;
    out.d = d;
    const double denom = d.dot(normal_);
    const double num = (point_ - z).dot(normal_);
    if (denom == 0.0) {
        // only a ray lying within the plane is degenerate
        if (std::abs(num) < 1e-12 * (1.0 + z.norm())) out.tangential = true;
        return out;
    }
    const double t = num / denom;
    if (t > 1e-12 && t <= t_max) out.t.push_back(t);
    return out;
}

double PlaneScene::surface_distance(const Vec& p) const {
    return std::abs((p - point_).dot(normal_));
}

Vec PlaneScene::project_to_surface(const Vec& p) const {
    return p - normal_ * (p - point_).dot(normal_);
}

// -------------------------------------------------------------- ImplicitScene

ImplicitScene::ImplicitScene(std::function<double(const Vec&)> f,
                             std::function<Vec(const Vec&)> grad,
                             int dim,
                             double feature_scale,
                             Vec bound_center,
                             double bound_radius)
    : f_(std::move(f)),
      grad_(std::move(grad)),
      dim_(dim),
      feature_scale_(feature_scale),
      bound_center_(bound_center),
      bound_radius_(bound_radius) {}

double ImplicitScene::crossing_bound(const Vec& from) const {
    return (from - bound_center_).norm() + bound_radius_ * 1.001;
}

CrossingList ImplicitScene::crossings(const Vec& z, const Vec& d, double t_max) const {
    CrossingList out;
    out.z = z;
    out.d = d;
    if (!(t_max > 0.0) || !std::isfinite(t_max)) t_max = crossing_bound(z);
    t_max = std::min(t_max, crossing_bound(z));
    if (t_max <= 0.0) return out;

    const double step_cap = std::min(0.05 * feature_scale_, t_max / 256.0);
    const double t_min = 1e-12 * feature_scale_;
    const double g_scale = grad_(z).norm();
    const double noise_floor = 1e-13 * std::max(1.0, g_scale * feature_scale_);

    auto sign_of = [&](double v) -> int {
        if (v > noise_floor) return 1;
        if (v < -noise_floor) return -1;
        return 0;
    };

    // Seed the sign: analytic when the base point sits on the surface.
    int prev_sign;
    double prev_t = 0.0;
    double march_from = t_min;
    const double f0 = f_(z);
    if (std::abs(f0) < 1e-7 * g_scale * feature_scale_) {
        const double gd = grad_(z).dot(d);
        const double sin_delta = g_scale > 0.0 ? gd / g_scale : 0.0;
        if (std::abs(sin_delta) < 1e-5) {
            // Nearly tangent ray from an on-surface point: the near crossing
            // sits below what marching can resolve against rounding noise, so
            // take it from the local quadratic f ~ gd t + q t^2/2.
            const double u0 = 1e-4 * feature_scale_;
            const double q = (f_(z + d * u0) + f_(z - d * u0) - 2.0 * f0) / (u0 * u0);
            if (q != 0.0) {
                const double t1 = -2.0 * gd / q;
                march_from = std::max(64.0 * std::abs(t1), 1e-5 * feature_scale_);
                if (t1 > 0.0 && t1 <= std::min(march_from, t_max)) out.t.push_back(t1);
                prev_sign = sign_of(f_(z + d * march_from));
                if (prev_sign == 0) prev_sign = q > 0.0 ? 1 : -1;
                prev_t = march_from * 0.5;
            } else {
                prev_sign = gd >= 0.0 ? 1 : -1;
            }
        } else {
            prev_sign = gd > 0.0 ? 1 : -1;
        }
    } else {
        prev_sign = f0 > 0 ? 1 : -1;
    }

    auto polish = [&](double a, double b) -> double {
        double fa = f_(z + d * a);
        for (int it = 0; it < 80; ++it) {
            double m = 0.5 * (a + b);
            double fm = f_(z + d * m);
            if ((fm > 0) == (fa > 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
            if (b - a < 1e-15 * std::max(1.0, b)) break;
        }
        double t = 0.5 * (a + b);
        for (int it = 0; it < 4; ++it) {
            Vec p = z + d * t;
            double g = grad_(p).dot(d);
            if (std::abs(g) < 1e-300) break;
            double tn = t - f_(p) / g;
            if (tn > a - (b - a) && tn < b + (b - a)) t = tn;
        }
        return t;
    };

    // Geometric march near the base point, then uniform steps.
    double t = march_from;
    while (t < t_max) {
        double f = f_(z + d * t);
        int s = sign_of(f);
        if (s != 0 && prev_sign != 0 && s != prev_sign) {
            double root = polish(prev_t > 0 ? prev_t : t_min * 0.5, t);
            Vec p = z + d * root;
            Vec g = grad_(p);
            if (std::abs(g.dot(d)) < kTangencyTol * g.norm()) {
                out.tangential = true;
            } else {
                out.t.push_back(root);
            }
        }
        if (s != 0) {
            prev_sign = s;
            prev_t = t;
        }
        double next = std::min(t * 1.35, t + step_cap);
        if (next <= t) break;
        t = next;
    }
    sort_and_dedupe(out.t, 1e-12 * feature_scale_);
    return out;
}

Vec ImplicitScene::orientation_normal(const Vec& z) const {
    return grad_(z).normalized();
}

double ImplicitScene::surface_distance(const Vec& p) const {
    double g = grad_(p).norm();
    if (g < 1e-300) return std::numeric_limits<double>::infinity();
    return std::abs(f_(p)) / g;
}

Vec ImplicitScene::project_to_surface(const Vec& p) const {
    Vec x = p;
    for (int it = 0; it < 64; ++it) {
        double f = f_(x);
        Vec g = grad_(x);
        double g2 = g.squared_norm();
        if (g2 < 1e-300) break;
        x = x - g * (f / g2);
        if (std::abs(f) < 1e-14 * feature_scale_ * std::sqrt(g2)) break;
    }
    return x;
}

std::shared_ptr<Scene> make_implicit_scene(const std::string& name,
                                           const std::vector<double>& params) {
    auto p = [&](size_t i, double def) { return i < params.size() ? params[i] : def; };
    if (name == "sphere") {
        double r = p(0, 1.0);
        auto f = [r](const Vec& x) { return x.squared_norm() - r * r; };
        auto g = [](const Vec& x) { return x * 2.0; };
        return std::make_shared<ImplicitScene>(f, g, 3, r, Vec(0, 0, 0), r);
    }
    if (name == "circle") {
        double r = p(0, 1.0);
        auto f = [r](const Vec& x) { return x.squared_norm() - r * r; };
        auto g = [](const Vec& x) { return x * 2.0; };
        return std::make_shared<ImplicitScene>(f, g, 2, r, Vec::zero(2), r);
    }
    if (name == "torus") {
        double R = p(0, 2.0), r = p(1, 0.5);
        auto f = [R, r](const Vec& x) {
            double w = std::sqrt(x[0] * x[0] + x[1] * x[1]) - R;
            return w * w + x[2] * x[2] - r * r;
        };
        auto g = [R](const Vec& x) {
            double s = std::sqrt(x[0] * x[0] + x[1] * x[1]);
            double w = s - R;
            double fac = s > 1e-300 ? 2.0 * w / s : 0.0;
            return Vec(fac * x[0], fac * x[1], 2.0 * x[2]);
        };
        return std::make_shared<ImplicitScene>(f, g, 3, r, Vec(0, 0, 0), R + r);
    }
    if (name == "plane") {
        return std::make_shared<PlaneScene>(Vec(0, 0, 0), Vec(0, 0, 1));
    }
    // Graphs z = g(x, y) over a bounded disk, oriented upward.
    auto graph_scene = [&](std::function<double(double, double)> gf,
                           std::function<Vec(double, double)> ggrad,
                           double feature, double bound) {
        auto f = [gf](const Vec& x) { return x[2] - gf(x[0], x[1]); };
        auto g = [ggrad](const Vec& x) {
            Vec gg = ggrad(x[0], x[1]);
            return Vec(-gg[0], -gg[1], 1.0);
        };
        return std::make_shared<ImplicitScene>(f, g, 3, feature, Vec(0, 0, 0), bound);
    };
    if (name == "graph:paraboloid") {
        double a = p(0, 0.5);
        return graph_scene([a](double x, double y) { return a * (x * x + y * y); },
                           [a](double x, double y) { return Vec(2 * a * x, 2 * a * y, 0.0); },
                           1.0 / std::max(1e-6, std::abs(2 * a)), 20.0);
    }
    if (name == "graph:saddle") {
        double a = p(0, 0.5);
        return graph_scene([a](double x, double y) { return a * (x * x - y * y); },
                           [a](double x, double y) { return Vec(2 * a * x, -2 * a * y, 0.0); },
                           1.0 / std::max(1e-6, std::abs(2 * a)), 20.0);
    }
    if (name == "graph:bump") {
        double a = p(0, 1.0);
        return graph_scene([a](double x, double y) { return a * std::exp(-(x * x + y * y)); },
                           [a](double x, double y) {
                               double e = std::exp(-(x * x + y * y));
                               return Vec(-2 * a * x * e, -2 * a * y * e, 0.0);
                           },
                           0.5 / std::max(1e-6, std::abs(a)), 20.0);
    }
    throw ConfigError("unknown implicit scene: " + name);
}

// -------------------------------------------------------------- TriMeshScene

namespace {

struct Aabb {
    Vec lo{1e300, 1e300, 1e300};
    Vec hi{-1e300, -1e300, -1e300};
    void grow(const Vec& p) {
        for (int i = 0; i < 3; ++i) {
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    }
    void grow(const Aabb& b) {
        grow(b.lo);
        grow(b.hi);
    }
    double distance2(const Vec& p) const {
        double d2 = 0.0;
        for (int i = 0; i < 3; ++i) {
            double d = std::max({lo[i] - p[i], 0.0, p[i] - hi[i]});
            d2 += d * d;
        }
        return d2;
    }
    bool ray_hits(const Vec& o, const Vec& inv_d, double t_max) const {
        double t0 = 0.0, t1 = t_max;
        for (int i = 0; i < 3; ++i) {
            double a = (lo[i] - o[i]) * inv_d[i];
            double b = (hi[i] - o[i]) * inv_d[i];
            if (a > b) std::swap(a, b);
            t0 = std::max(t0, a);
            t1 = std::min(t1, b);
            if (t0 > t1) return false;
        }
        return true;
    }
};

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection).
Vec closest_point_on_triangle(const Vec& p, const Vec& a, const Vec& b, const Vec& c) {
    Vec ab = b - a, ac = c - a, ap = p - a;
    double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return a;
    Vec bp = p - b;
    double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return b;
    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
    Vec cp = p - c;
    double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return c;
    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
    double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

} // namespace

struct TriMeshScene::Accel {
    struct Node {
        Aabb box;
        int left = -1, right = -1;
        int start = 0, count = 0; // leaf when count > 0
    };
    std::vector<Node> nodes;
    std::vector<int> order;
    const TriMesh* mesh = nullptr;

    Vec centroid(int t) const {
        const auto& tri = mesh->triangles[static_cast<size_t>(t)];
        return (mesh->vertices[static_cast<size_t>(tri[0])] +
                mesh->vertices[static_cast<size_t>(tri[1])] +
                mesh->vertices[static_cast<size_t>(tri[2])]) * (1.0 / 3.0);
    }
    Aabb tri_box(int t) const {
        const auto& tri = mesh->triangles[static_cast<size_t>(t)];
        Aabb b;
        for (int k = 0; k < 3; ++k) b.grow(mesh->vertices[static_cast<size_t>(tri[static_cast<size_t>(k)])]);
        return b;
    }

    int build_node(int start, int count) {
        Node node;
        for (int i = 0; i < count; ++i) node.box.grow(tri_box(order[static_cast<size_t>(start + i)]));
        int idx = static_cast<int>(nodes.size());
        nodes.push_back(node);
        if (count <= 8) {
            nodes[static_cast<size_t>(idx)].start = start;
            nodes[static_cast<size_t>(idx)].count = count;
            return idx;
        }
        int axis = 0;
        Vec ext = node.box.hi - node.box.lo;
        if (ext[1] > ext[axis]) axis = 1;
        if (ext[2] > ext[axis]) axis = 2;
        auto mid = order.begin() + start + count / 2;
        std::nth_element(order.begin() + start, mid, order.begin() + start + count,
                         [&](int a, int b) { return centroid(a)[axis] < centroid(b)[axis]; });
        int lcount = count / 2;
        int l = build_node(start, lcount);
        int r = build_node(start + lcount, count - lcount);
        nodes[static_cast<size_t>(idx)].left = l;
        nodes[static_cast<size_t>(idx)].right = r;
        return idx;
    }

    explicit Accel(const TriMesh& m) : mesh(&m) {
        order.resize(m.triangles.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        if (!order.empty()) build_node(0, static_cast<int>(order.size()));
    }

    // Moller-Trumbore; near-degenerate or near-edge hits set `tangential`.
    void tri_intersect(int t, const Vec& o, const Vec& d, double t_eps, double t_max,
                       std::vector<double>& ts, bool& tangential) const {
        const auto& tri = mesh->triangles[static_cast<size_t>(t)];
        const Vec& a = mesh->vertices[static_cast<size_t>(tri[0])];
        const Vec& b = mesh->vertices[static_cast<size_t>(tri[1])];
        const Vec& c = mesh->vertices[static_cast<size_t>(tri[2])];
        Vec e1 = b - a, e2 = c - a;
        Vec pv = d.cross(e2);
        double det = e1.dot(pv);
        double edge2 = std::max(e1.squared_norm(), e2.squared_norm());
        if (std::abs(det) < 1e-12 * edge2) return; // parallel to the plane
        double inv = 1.0 / det;
        Vec tv = o - a;
        double u = tv.dot(pv) * inv;
        Vec qv = tv.cross(e1);
        double v = d.dot(qv) * inv;
        double w = 1.0 - u - v;
        double tol = 1e-10;
        if (u < -tol || v < -tol || w < -tol) return;
        double th = e2.dot(qv) * inv;
        if (th <= t_eps || th > t_max) return;
        if (u < tol || v < tol || w < tol) {
            tangential = true; // hit within tolerance of an edge
            return;
        }
        if (std::abs(det) < 1e-8 * edge2) {
            tangential = true; // grazing incidence
            return;
        }
        ts.push_back(th);
    }

    void ray_hits(const Vec& o, const Vec& d, double t_eps, double t_max,
                  std::vector<double>& ts, bool& tangential) const {
        if (nodes.empty()) return;
        Vec inv_d(1.0 / (d[0] != 0 ? d[0] : 1e-300),
                  1.0 / (d[1] != 0 ? d[1] : 1e-300),
                  1.0 / (d[2] != 0 ? d[2] : 1e-300));
        std::vector<int> stack{0};
        while (!stack.empty()) {
            int ni = stack.back();
            stack.pop_back();
            const Node& node = nodes[static_cast<size_t>(ni)];
            if (!node.box.ray_hits(o, inv_d, t_max)) continue;
            if (node.count > 0) {
                for (int i = 0; i < node.count; ++i)
                    tri_intersect(order[static_cast<size_t>(node.start + i)], o, d, t_eps, t_max, ts, tangential);
            } else {
                stack.push_back(node.left);
                stack.push_back(node.right);
            }
        }
    }

    void closest(const Vec& p, int ni, double& best2, Vec& best_pt, int& best_tri) const {
        const Node& node = nodes[static_cast<size_t>(ni)];
        if (node.box.distance2(p) >= best2) return;
        if (node.count > 0) {
            for (int i = 0; i < node.count; ++i) {
                int t = order[static_cast<size_t>(node.start + i)];
                const auto& tri = mesh->triangles[static_cast<size_t>(t)];
                Vec q = closest_point_on_triangle(p,
                                                  mesh->vertices[static_cast<size_t>(tri[0])],
                                                  mesh->vertices[static_cast<size_t>(tri[1])],
                                                  mesh->vertices[static_cast<size_t>(tri[2])]);
                double d2 = (p - q).squared_norm();
                if (d2 < best2) {
                    best2 = d2;
                    best_pt = q;
                    best_tri = t;
                }
            }
            return;
        }
        double dl = nodes[static_cast<size_t>(node.left)].box.distance2(p);
        double dr = nodes[static_cast<size_t>(node.right)].box.distance2(p);
        if (dl < dr) {
            closest(p, node.left, best2, best_pt, best_tri);
            closest(p, node.right, best2, best_pt, best_tri);
        } else {
            closest(p, node.right, best2, best_pt, best_tri);
            closest(p, node.left, best2, best_pt, best_tri);
        }
    }

    Vec closest_point(const Vec& p, int* tri_out = nullptr) const {
        double best2 = 1e300;
        Vec best_pt = p;
        int best_tri = -1;
        if (!nodes.empty()) closest(p, 0, best2, best_pt, best_tri);
        if (tri_out) *tri_out = best_tri;
        return best_pt;
    }
};

TriMeshScene::TriMeshScene(TriMesh mesh) : mesh_(std::move(mesh)) {
    if (mesh_.vertex_normals.size() != mesh_.vertices.size()) mesh_.compute_vertex_normals();
    Aabb box;
    for (const auto& v : mesh_.vertices) box.grow(v);
    bound_center_ = (box.lo + box.hi) * 0.5;
    bound_radius_ = 0.5 * (box.hi - box.lo).norm();
    scale_ = std::max(bound_radius_, 1e-12);
    edge_len_ = mesh_.mean_edge_length();
    accel_ = std::make_unique<Accel>(mesh_);
}

TriMeshScene::~TriMeshScene() = default;

double TriMeshScene::crossing_bound(const Vec& from) const {
    return (from - bound_center_).norm() + bound_radius_ * 1.001;
}

CrossingList TriMeshScene::crossings(const Vec& z, const Vec& d, double t_max) const {
    CrossingList out;
    out.z = z;
    out.d = d;
    t_max = std::min(t_max, crossing_bound(z));
    accel_->ray_hits(z, d, 1e-9 * scale_, t_max, out.t, out.tangential);
    sort_and_dedupe(out.t, 1e-12 * scale_);
    return out;
}

Vec TriMeshScene::orientation_normal(const Vec& z) const {
    int tri_idx = -1;
    Vec q = accel_->closest_point(z, &tri_idx);
    (void)q;
    if (tri_idx < 0) throw PointNotOnSurface("empty mesh");
    const auto& tri = mesh_.triangles[static_cast<size_t>(tri_idx)];
    const Vec& a = mesh_.vertices[static_cast<size_t>(tri[0])];
    const Vec& b = mesh_.vertices[static_cast<size_t>(tri[1])];
    const Vec& c = mesh_.vertices[static_cast<size_t>(tri[2])];
    // Barycentric interpolation of vertex normals at the closest point.
    Vec n0 = (b - a).cross(c - a);
    double area2 = n0.squared_norm();
    double wa = (b - q).cross(c - q).dot(n0) / area2;
    double wb = (c - q).cross(a - q).dot(n0) / area2;
    double wc = 1.0 - wa - wb;
    Vec n = mesh_.vertex_normals[static_cast<size_t>(tri[0])] * wa +
            mesh_.vertex_normals[static_cast<size_t>(tri[1])] * wb +
            mesh_.vertex_normals[static_cast<size_t>(tri[2])] * wc;
    return n.normalized();
}

double TriMeshScene::surface_distance(const Vec& p) const {
    return (p - accel_->closest_point(p)).norm();
}

Vec TriMeshScene::project_to_surface(const Vec& p) const {
    return accel_->closest_point(p);
}

// ------------------------------------------------------------- free functions

bool segment_parity_odd(const Scene& scene, const Vec& x, const Vec& y) {
    Vec diff = y - x;
    double len = diff.norm();
    if (len <= 0.0) throw ConfigError("segment_parity: x == y");
    Vec d = diff * (1.0 / len);
    CrossingList cl = scene.crossings(x, d, len);
    if (cl.tangential) throw TangencyDetected("segment_parity: tangential crossing");
    double end_tol = 1e-9 * scene.scale();
    for (double t : cl.t) {
        if (t < end_tol || t > len - end_tol)
            throw EndpointOnSurface("segment_parity: endpoint within tolerance of S");
    }
    return cl.t.size() % 2 == 1;
}

int classify(const Scene& scene, const Vec& z, const Vec& n_z, const Vec& y) {
    Vec diff = y - z;
    double len = diff.norm();
    if (len <= 0.0) throw ConfigError("classify: y == z");
    double h = (z - y).dot(n_z);
    if (h == 0.0) return 0;
    Vec d = diff * (1.0 / len);
    // Open segment excluding the crossing at z itself: crossings() already
    // discards roots below its base tolerance.
    CrossingList cl = scene.crossings(z, d, len * (1.0 - 1e-12));
    if (cl.tangential) throw TangencyDetected("classify: tangential crossing");
    bool odd = cl.t.size() % 2 == 1;
    bool in_interior_side = (!odd && h > 0.0) || (odd && h < 0.0);
    return in_interior_side ? 1 : -1;
}

TangentFrame tangent_frame(const Scene& scene, const Vec& z) {
    if (!scene.on_surface(z))
        throw PointNotOnSurface("tangent_frame: point not on the surface");
    TangentFrame fr;
    fr.z = z;
    fr.normal = scene.orientation_normal(z);
    const int n = scene.dim();
    if (n == 2) {
        fr.tangent[0] = Vec(-fr.normal[1], fr.normal[0]);
        fr.n_tangents = 1;
    } else {
        int k = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(fr.normal[i]) < std::abs(fr.normal[k])) k = i;
        Vec e = Vec::axis(3, k);
        e = (e - fr.normal * e.dot(fr.normal)).normalized();
        fr.tangent[0] = e;
        fr.tangent[1] = fr.normal.cross(e);
        fr.n_tangents = 2;
    }
    return fr;
}

TangentProjection project_to_tangent(const Vec& z, const TangentFrame& frame, const Vec& y) {
    Vec diff = y - z;
    double len = diff.norm();
    if (len <= 0.0) throw ConfigError("project_to_tangent: y == z");
    double h = diff.dot(frame.normal);
    Vec tang = diff - frame.normal * h;
    double rho = tang.norm();
    if (rho < 1e-12 * len)
        throw DegenerateProjection("project_to_tangent: y on the normal line");
    TangentProjection out;
    out.h = h;
    out.rho = rho;
    out.e_hat = tang * (1.0 / rho);
    out.y_prime = z + tang;
    return out;
}

} // namespace nlcurv

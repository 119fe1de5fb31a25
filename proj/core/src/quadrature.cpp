#include "nlcurv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nlcurv/errors.hpp"
#include "nlcurv/parallel.hpp"
#include "nlcurv/specfun.hpp"

namespace nlcurv {

namespace {
constexpr double kPi = std::numbers::pi;

double log_cosh(double x) {
    double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}
} // namespace

double QuadratureSpec::effective_r_max(double scene_scale) const {
    return r_max > 0.0 ? r_max : 1e4 * scene_scale;
}

void QuadratureSpec::validate(double scene_scale) const {
    if (n_phi < 8 || n_dir < 8) throw ConfigError("quadrature node counts must be >= 8");
    if (!(eps_cutoff > 0.0) || eps_cutoff >= scene_scale)
        throw ConfigError("eps_cutoff must lie in (0, scene_scale)");
    if (effective_r_max(scene_scale) <= 10.0 * scene_scale)
        throw ConfigError("r_max must exceed 10 * scene_scale");
    if (mc_samples < 32) throw ConfigError("mc_samples must be >= 32");
}

RadialPV radial_pv(const RadialPiecewise& rp, double weight, double r_max,
                   QuadratureSpec::Tail tail) {
    RadialPV out;
    const double inv_sigma = 1.0 / rp.sigma;
    out.divergence_coeff = rp.s0 * weight * inv_sigma;
    double sum = 0.0;
    int s_prev = rp.s0;
    for (double r : rp.r) {
        sum += -2.0 * s_prev * std::pow(r, -rp.sigma);
        s_prev = -s_prev;
    }
    if (tail == QuadratureSpec::Tail::truncate)
        sum -= s_prev * std::pow(r_max, -rp.sigma);
    out.finite_part = weight * inv_sigma * sum;
    return out;
}

std::vector<AngularNode> angular_nodes(int m) {
    // Double-exponential map clustering at delta = 0, where the radial
    // integrals behave like delta^{-sigma}. t_max reaches nodes deep enough
    // that the skipped remainder is ~delta_min^{1-sigma}, negligible even at
    // sigma = 0.99.
    const double t_max = 6.6;
    const double h = 2.0 * t_max / (m - 1);
    const double log_pref = std::log(h * kPi * kPi / 8.0);
    std::vector<AngularNode> nodes;
    nodes.reserve(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
        double t = -t_max + j * h;
        double s = 0.5 * kPi * std::sinh(t);
        double delta;
        if (s >= 0.0) {
            double em = std::exp(-2.0 * s);
            delta = 0.5 * kPi * em / (1.0 + em);
        } else {
            delta = 0.25 * kPi * (1.0 - std::tanh(s));
        }
        double lw = log_pref + log_cosh(t) - 2.0 * log_cosh(s);
        if (lw < -668.0 || !(delta > 0.0) || delta >= 0.5 * kPi) continue;
        nodes.push_back({delta, std::exp(lw)});
    }
    return nodes;
}

namespace {

// One mirrored node pair of the half-plane/full-sphere grids. The two rays
// share the node weight, and their s0 = +/-1 divergence coefficients cancel
// identically, which realizes the eps -> 0 limit exactly.
struct PairResult {
    double finite = 0.0;
    double tail_bound = 0.0;
};

PairResult ray_pair(const Scene& scene, const Vec& z, const Vec& n, const Vec& tau,
                    double delta, double weight, double sigma, double r_max,
                    QuadratureSpec::Tail tail, int dim) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        double d = delta * (1.0 + attempt * 3e-7);
        if (d >= 0.5 * kPi) d = delta;
        double sd = std::sin(d), cd = std::cos(d);
        Vec up = n * (-sd) + tau * cd;   // points to the interior side: s0 = +1
        Vec lo = -up;
        CrossingList cu = scene.crossings(z, up, r_max);
        CrossingList cl = scene.crossings(z, lo, r_max);
        if (cu.tangential || cl.tangential) continue;
        double w = weight * (dim == 3 ? cd : 1.0);
        RadialPV a = radial_pv({+1, std::move(cu.t), sigma}, w, r_max, tail);
        RadialPV b = radial_pv({-1, std::move(cl.t), sigma}, w, r_max, tail);
        PairResult out;
        out.finite = a.finite_part + b.finite_part;
        out.tail_bound = 2.0 * w * std::pow(r_max, -sigma) / sigma;
        return out;
    }
    throw CancellationFailure("ray pair stayed tangential after jittering");
}

} // namespace

double halfplane_pv_integral(const Scene& scene, const Vec& z, const TangentFrame& frame,
                             const Vec& e, double sigma, const QuadratureSpec& spec,
                             QuadDiagnostics* diag) {
    const int n = scene.dim();
    const double r_max = spec.effective_r_max(scene.scale());
    const auto nodes = angular_nodes(std::max(8, spec.n_phi / 2));

    std::vector<PairResult> res(nodes.size());
    std::vector<std::exception_ptr> errs(nodes.size());
    parallel_for(static_cast<int>(nodes.size()), [&](int i) {
        try {
            res[static_cast<size_t>(i)] =
                ray_pair(scene, z, frame.normal, e, nodes[static_cast<size_t>(i)].delta,
                         nodes[static_cast<size_t>(i)].weight, sigma, r_max, spec.tail, n);
        } catch (...) {
            errs[static_cast<size_t>(i)] = std::current_exception();
        }
    });
    for (auto& ep : errs)
        if (ep) std::rethrow_exception(ep);

    double total = 0.0, tail_bound = 0.0;
    for (const auto& r : res) {
        total += r.finite;
        tail_bound += r.tail_bound;
    }
    if (diag) {
        diag->tail_bound = tail_bound;
        diag->cancel_residual = 0.0; // s0 = +/-1 coefficients share one weight
        diag->n_nodes = 2 * static_cast<int>(nodes.size());
        diag->truncation_warning =
            spec.tail == QuadratureSpec::Tail::truncate && tail_bound > 1e-6 * std::abs(total);
    }
    return total;
}

double halfplane_pv_bruteforce(const Scene& scene, const Vec& z, const TangentFrame& frame,
                               const Vec& e, double sigma, const QuadratureSpec& spec,
                               double eps);

namespace {

double halfplane_with_cutoff(const Scene& scene, const Vec& z, const TangentFrame& frame,
                             const Vec& e, double sigma, const QuadratureSpec& spec,
                             double eps) {
    const int n = scene.dim();
    const double r_max = spec.effective_r_max(scene.scale());
    const auto nodes = angular_nodes(std::max(8, spec.n_phi / 2));
    std::vector<double> vals(nodes.size());
    parallel_for(static_cast<int>(nodes.size()), [&](int i) {
        const auto& nd = nodes[static_cast<size_t>(i)];
        double sd = std::sin(nd.delta), cd = std::cos(nd.delta);
        double w = nd.weight * (n == 3 ? cd : 1.0);
        double v = 0.0;
        for (int side = 0; side < 2; ++side) {
            Vec u = frame.normal * (side == 0 ? -sd : sd) + e * cd;
            int s0 = side == 0 ? 1 : -1;
            CrossingList c = scene.crossings(z, u, r_max);
            // drop crossings inside the cutoff ball, flipping the start sign
            std::vector<double> kept;
            for (double t : c.t) {
                if (t < eps) {
                    s0 = -s0;
                } else {
                    kept.push_back(t);
                }
            }
            RadialPV rv = radial_pv({s0, std::move(kept), sigma}, w, r_max, spec.tail);
            v += rv.finite_part + rv.divergence_coeff * std::pow(eps, -sigma);
        }
        vals[static_cast<size_t>(i)] = v;
    });
    double total = 0.0;
    for (double v : vals) total += v;
    return total;
}

} // namespace

double halfplane_pv_bruteforce(const Scene& scene, const Vec& z, const TangentFrame& frame,
                               const Vec& e, double sigma, const QuadratureSpec& spec) {
    // Cutoff ladder, then Richardson in eps^{1-sigma} (the leading term of the
    // eps-truncation error for a C^2 surface).
    std::vector<double> eps_ladder, vals, xs;
    for (double f : {1e-2, 3e-3, 1e-3, 3e-4, 1e-4}) {
        double eps = f * scene.scale();
        eps_ladder.push_back(eps);
        vals.push_back(halfplane_with_cutoff(scene, z, frame, e, sigma, spec, eps));
        xs.push_back(std::pow(eps, 1.0 - sigma));
    }
    // Neville tableau evaluated at x = 0.
    std::vector<double> p = vals;
    size_t m = p.size();
    for (size_t lev = 1; lev < m; ++lev)
        for (size_t i = 0; i + lev < m; ++i)
            p[i] = (xs[i + lev] * p[i] - xs[i] * p[i + 1]) / (xs[i + lev] - xs[i]);
    return p[0];
}

void fullsphere_pv_scan(const Scene& scene, const Vec& z, const TangentFrame& frame,
                        double sigma, const QuadratureSpec& spec,
                        const std::function<void(const Vec& u, double value)>& visit,
                        QuadDiagnostics* diag) {
    const int n = scene.dim();
    const double r_max = spec.effective_r_max(scene.scale());
    const auto nodes = angular_nodes(std::max(8, spec.n_phi / 2));

    std::vector<Vec> taus;
    double psi_w;
    if (n == 2) {
        taus = {frame.tangent[0], -frame.tangent[0]};
        psi_w = 1.0;
    } else {
        int n_psi = std::max(8, spec.n_dir + (spec.n_dir & 1));
        taus.reserve(static_cast<size_t>(n_psi));
        for (int k = 0; k < n_psi; ++k) {
            double psi = 2.0 * kPi * (k + 0.5) / n_psi;
            taus.push_back(frame.tangent[0] * std::cos(psi) + frame.tangent[1] * std::sin(psi));
        }
        psi_w = 2.0 * kPi / n_psi;
    }

    struct Slot {
        Vec up;
        double v_up, v_lo, tail;
    };
    std::vector<Slot> slots(nodes.size() * taus.size());
    std::vector<std::exception_ptr> errs(nodes.size());
    parallel_for(static_cast<int>(nodes.size()), [&](int i) {
        try {
            const auto& nd = nodes[static_cast<size_t>(i)];
            for (size_t k = 0; k < taus.size(); ++k) {
                double w = nd.weight * psi_w;
                for (int attempt = 0;; ++attempt) {
                    if (attempt >= 8)
                        throw CancellationFailure("direction pair stayed tangential");
                    double d = nd.delta * (1.0 + attempt * 3e-7);
                    double sd = std::sin(d), cd = std::cos(d);
                    Vec up = frame.normal * (-sd) + taus[k] * cd;
                    CrossingList cu = scene.crossings(z, up, r_max);
                    CrossingList cl = scene.crossings(z, -up, r_max);
                    if (cu.tangential || cl.tangential) continue;
                    double ww = w * (n == 3 ? cd : 1.0);
                    RadialPV a = radial_pv({+1, std::move(cu.t), sigma}, ww, r_max, spec.tail);
                    RadialPV b = radial_pv({-1, std::move(cl.t), sigma}, ww, r_max, spec.tail);
                    Slot& sl = slots[static_cast<size_t>(i) * taus.size() + k];
                    sl.up = up;
                    sl.v_up = a.finite_part;
                    sl.v_lo = b.finite_part;
                    sl.tail = 2.0 * ww * std::pow(r_max, -sigma) / sigma;
                    break;
                }
            }
        } catch (...) {
            errs[static_cast<size_t>(i)] = std::current_exception();
        }
    });
    for (auto& ep : errs)
        if (ep) std::rethrow_exception(ep);

    double tail_bound = 0.0;
    for (const auto& sl : slots) {
        visit(sl.up, sl.v_up);
        visit(-sl.up, sl.v_lo);
        tail_bound += sl.tail;
    }
    if (diag) {
        diag->tail_bound = tail_bound;
        diag->cancel_residual = 0.0;
        diag->n_nodes = 2 * static_cast<int>(slots.size());
    }
}

// ------------------------------------------------------------ mesh quadrature

namespace {

// 6-point degree-4 symmetric triangle rule.
constexpr double kTriA1 = 0.108103018168070, kTriB1 = 0.445948490915965;
constexpr double kTriW1 = 0.223381589678011;
constexpr double kTriA2 = 0.816847572980459, kTriB2 = 0.091576213509771;
constexpr double kTriW2 = 0.109951743655322;

struct TriRuleNode {
    double l0, l1, l2, w;
};
constexpr TriRuleNode kTriRule[6] = {
    {kTriA1, kTriB1, kTriB1, kTriW1}, {kTriB1, kTriA1, kTriB1, kTriW1},
    {kTriB1, kTriB1, kTriA1, kTriW1}, {kTriA2, kTriB2, kTriB2, kTriW2},
    {kTriB2, kTriA2, kTriB2, kTriW2}, {kTriB2, kTriB2, kTriA2, kTriW2},
};

// Curved cubic patch over a facet (PN triangle, Vlachos et al. 2001) built
// from the vertex positions and vertex normals. A flat facet through z makes
// the kernel weight (z-y).n(y) decay only linearly near z (the interpolated
// normal tilts out of the facet plane by O(edge)), which is not integrable
// against r^{-n-sigma}. The curved patch interpolates position and normal at
// the corners, so with z at a mesh vertex the weight recovers its quadratic
// decay and the refinement converges.
struct PnPatch {
    // Bezier control net, barycentric (u, v, w) at corners (a, b, c)
    Vec p300, p030, p003, p210, p120, p021, p012, p102, p201, p111;
    double sgn = 1.0; // +1 when the winding normal is A_i's outward normal

    static PnPatch build(const Vec& a, const Vec& b, const Vec& c,
                         const Vec& na, const Vec& nb, const Vec& nc) {
        auto edge_pt = [](const Vec& p, const Vec& q, const Vec& np) {
            return (p * 2.0 + q - np * (q - p).dot(np)) * (1.0 / 3.0);
        };
        PnPatch t;
        t.p300 = a;
        t.p030 = b;
        t.p003 = c;
        t.p210 = edge_pt(a, b, na);
        t.p120 = edge_pt(b, a, nb);
        t.p021 = edge_pt(b, c, nb);
        t.p012 = edge_pt(c, b, nc);
        t.p102 = edge_pt(c, a, nc);
        t.p201 = edge_pt(a, c, na);
        Vec e = (t.p210 + t.p120 + t.p021 + t.p012 + t.p102 + t.p201) * (1.0 / 6.0);
        Vec v = (a + b + c) * (1.0 / 3.0);
        t.p111 = e + (e - v) * 0.5;
        return t;
    }

    Vec eval(double v, double w) const {
        double u = 1.0 - v - w;
        return p300 * (u * u * u) + p030 * (v * v * v) + p003 * (w * w * w) +
               p210 * (3 * u * u * v) + p120 * (3 * u * v * v) + p021 * (3 * v * v * w) +
               p012 * (3 * v * w * w) + p102 * (3 * u * w * w) + p201 * (3 * u * u * w) +
               p111 * (6 * u * v * w);
    }

    // Unnormalized geometric normal d/dv x d/dw; |.| is the area element
    // relative to dv dw, orientation matches the winding.
    Vec geom_normal(double v, double w) const {
        double u = 1.0 - v - w;
        Vec dv = p300 * (-3 * u * u) + p030 * (3 * v * v) + p210 * (3 * (u * u - 2 * u * v)) +
                 p120 * (3 * (2 * u * v - v * v)) + p021 * (6 * v * w) + p012 * (3 * w * w) +
                 p102 * (-3 * w * w) + p201 * (-6 * u * w) + p111 * (6 * w * (u - v));
        Vec dw = p300 * (-3 * u * u) + p003 * (3 * w * w) + p201 * (3 * (u * u - 2 * u * w)) +
                 p102 * (3 * (2 * u * w - w * w)) + p012 * (6 * v * w) + p021 * (3 * v * v) +
                 p120 * (-3 * v * v) + p210 * (-6 * u * v) + p111 * (6 * v * (u - w));
        return dv.cross(dw);
    }
};

// Sub-triangle in the (v, w) parameter domain of one patch.
struct ParamTri {
    double v[3], w[3];
    double param_area; // area in (v, w) coordinates
};

class TriIntegrator {
public:
    TriIntegrator(const Vec& z, const SurfaceKernel& kernel, double z_tol)
        : z_(z), kernel_(kernel), z_tol_(z_tol) {}

    void run(const PnPatch& patch, double* acc) {
        integrate(patch, {{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, 0.5}, 0, acc);
    }

private:
    void integrate(const PnPatch& p, const ParamTri& t, int depth, double* acc) {
        Vec corners[3];
        for (int i = 0; i < 3; ++i) corners[i] = p.eval(t.v[i], t.w[i]);
        double g_min = 1e300, g_max = 0.0;
        Vec ys[6], gn[6];
        for (int q = 0; q < 6; ++q) {
            const auto& nd = kTriRule[q];
            double vv = t.v[0] * nd.l0 + t.v[1] * nd.l1 + t.v[2] * nd.l2;
            double ww = t.w[0] * nd.l0 + t.w[1] * nd.l1 + t.w[2] * nd.l2;
            ys[q] = p.eval(vv, ww);
            gn[q] = p.geom_normal(vv, ww);
            double r = (z_ - ys[q]).norm();
            // refinement proxy: the steep radial factor dominates variation
            double g = r > 0.0 ? std::pow(r, -4.0) : 1e300;
            g_min = std::min(g_min, g);
            g_max = std::max(g_max, g);
        }
        const double edge = ((corners[1] - corners[0]).norm() + (corners[2] - corners[1]).norm() +
                             (corners[0] - corners[2]).norm()) /
                            3.0;
        const Vec centroid = (corners[0] + corners[1] + corners[2]) * (1.0 / 3.0);
        const double dist = (z_ - centroid).norm();
        const bool near = dist < 3.0 * edge;
        if (near && depth < 12 && (g_max - g_min) > 0.01 * g_max) {
            double mv01 = 0.5 * (t.v[0] + t.v[1]), mw01 = 0.5 * (t.w[0] + t.w[1]);
            double mv12 = 0.5 * (t.v[1] + t.v[2]), mw12 = 0.5 * (t.w[1] + t.w[2]);
            double mv20 = 0.5 * (t.v[2] + t.v[0]), mw20 = 0.5 * (t.w[2] + t.w[0]);
            double qa = 0.25 * t.param_area;
            integrate(p, {{t.v[0], mv01, mv20}, {t.w[0], mw01, mw20}, qa}, depth + 1, acc);
            integrate(p, {{mv01, t.v[1], mv12}, {mw01, t.w[1], mw12}, qa}, depth + 1, acc);
            integrate(p, {{mv20, mv12, t.v[2]}, {mw20, mw12, t.w[2]}, qa}, depth + 1, acc);
            integrate(p, {{mv01, mv12, mv20}, {mw01, mw12, mw20}, qa}, depth + 1, acc);
            return;
        }
        for (int q = 0; q < 6; ++q) {
            if ((z_ - ys[q]).norm() < z_tol_) continue;
            double jac = gn[q].norm();
            if (jac <= 0.0) continue;
            Vec n_ai = gn[q] * (p.sgn / jac);
            // rule weights sum to 1; area element is jac relative to dv dw
            kernel_(ys[q], n_ai, kTriRule[q].w * t.param_area * jac, acc);
        }
    }

    Vec z_;
    const SurfaceKernel& kernel_;
    double z_tol_;
};

} // namespace

void surface_integral(const TriMeshScene& scene, const Vec& z, const Vec& n_z,
                      int n_acc, const SurfaceKernel& kernel, const QuadratureSpec& spec,
                      double* acc) {
    (void)spec;
    const TriMesh& mesh = scene.mesh();
    const size_t n_tri = mesh.triangles.size();
    const double z_tol = 1e-9 * scene.scale();
    const int n_chunks = 64;
    std::vector<std::vector<double>> sums(static_cast<size_t>(n_chunks),
                                          std::vector<double>(static_cast<size_t>(n_acc), 0.0));
    std::vector<std::exception_ptr> errs(static_cast<size_t>(n_chunks));

    parallel_for(n_chunks, [&](int chunk) {
        try {
            TriIntegrator integ(z, kernel, z_tol);
            double* out = sums[static_cast<size_t>(chunk)].data();
            for (size_t t = static_cast<size_t>(chunk); t < n_tri;
                 t += static_cast<size_t>(n_chunks)) {
                const auto& tri = mesh.triangles[t];
                const Vec& a = mesh.vertices[static_cast<size_t>(tri[0])];
                const Vec& b = mesh.vertices[static_cast<size_t>(tri[1])];
                const Vec& c = mesh.vertices[static_cast<size_t>(tri[2])];
                Vec centroid = (a + b + c) * (1.0 / 3.0);
                Vec fn = (b - a).cross(c - a).normalized();
                double edge = ((b - a).norm() + (c - b).norm() + (a - c).norm()) / 3.0;

                // Which side of this facet belongs to A_i(z)? Probe both sides;
                // the outward normal of A_i points away from the inside.
                double sgn = 0.0;
                double delta = 0.25 * edge;
                for (int attempt = 0; attempt < 6 && sgn == 0.0; ++attempt, delta *= 0.5) {
                    try {
                        int cp = classify(scene, z, n_z, centroid + fn * delta);
                        int cm = classify(scene, z, n_z, centroid - fn * delta);
                        if (cp == 1 && cm == -1) sgn = -1.0;
                        if (cp == -1 && cm == 1) sgn = 1.0;
                    } catch (const Error&) {
                        // jittered retry below
                    }
                    if (sgn == 0.0) centroid = centroid + (a - centroid) * 0.05;
                }
                if (sgn == 0.0)
                    throw NearSingularityUnresolved("could not orient facet against A_i(z)");
                PnPatch patch =
                    PnPatch::build(a, b, c, mesh.vertex_normals[static_cast<size_t>(tri[0])],
                                   mesh.vertex_normals[static_cast<size_t>(tri[1])],
                                   mesh.vertex_normals[static_cast<size_t>(tri[2])]);
                patch.sgn = sgn;
                integ.run(patch, out);
            }
        } catch (...) {
            errs[static_cast<size_t>(chunk)] = std::current_exception();
        }
    });
    for (auto& ep : errs)
        if (ep) std::rethrow_exception(ep);

    for (int j = 0; j < n_acc; ++j) acc[j] = 0.0;
    for (const auto& s : sums)
        for (int j = 0; j < n_acc; ++j) acc[j] += s[static_cast<size_t>(j)];
}

// ------------------------------------------------------------ Monte Carlo

namespace {

struct McDriver {
    double sigma;
    Box box;
    int dim;
    double r_min, r_box, c_r;
    double vol, omega_sphere;

    McDriver(double sigma_, const Box& box_) : sigma(sigma_), box(box_), dim(box_.dim()) {
        double diam = box.diameter();
        r_min = 1e-3 * diam;
        r_box = 10.0 * diam;
        double p = dim - sigma;
        c_r = p / (std::pow(r_box, p) - std::pow(r_min, p));
        vol = box.volume();
        omega_sphere = specfun::unit_sphere_measure(dim - 1);
    }

    bool in_box(const Vec& p) const {
        for (int i = 0; i < dim; ++i)
            if (p[i] < box.lo[i] || p[i] > box.hi[i]) return false;
        return true;
    }

    template <typename Rng>
    Vec draw_x(Rng& rng) const {
        std::uniform_real_distribution<double> un(0.0, 1.0);
        Vec x = Vec::zero(dim);
        for (int i = 0; i < dim; ++i) x[i] = box.lo[i] + un(rng) * (box.hi[i] - box.lo[i]);
        return x;
    }

    template <typename Rng>
    double draw_r(Rng& rng) const {
        std::uniform_real_distribution<double> un(0.0, 1.0);
        double p = dim - sigma;
        double lo = std::pow(r_min, p);
        return std::pow(lo + un(rng) * (std::pow(r_box, p) - lo), 1.0 / p);
    }

    template <typename Rng>
    Vec draw_u(Rng& rng) const {
        std::normal_distribution<double> gauss(0.0, 1.0);
        Vec u = Vec::zero(dim);
        double m2;
        do {
            for (int i = 0; i < dim; ++i) u[i] = gauss(rng);
            m2 = u.squared_norm();
        } while (m2 < 1e-24);
        return u * (1.0 / std::sqrt(m2));
    }

    // Importance weight for one (x, y) pair: F * m * kernel / density.
    double pair_weight(double r) const { return vol * omega_sphere / (c_r * std::pow(r, dim)); }
};

// F(x, y, y_in_box_multiplier_enabled) -> contribution factor in {0, 1, 2}.
using PairFactor = std::function<double(const Vec& x, const Vec& y)>;

McResult mc_run(const McDriver& drv, const QuadratureSpec& spec, const PairFactor& factor) {
    constexpr int kBatches = 32;
    const long long per_batch = std::max<long long>(1, spec.mc_samples / kBatches);
    std::vector<double> batch_mean(kBatches, 0.0);
    std::vector<std::exception_ptr> errs(kBatches);

    parallel_for(kBatches, [&](int b) {
        try {
            std::mt19937_64 rng(substream_seed(spec.rng_seed, static_cast<uint64_t>(b)));
            double sum = 0.0;
            for (long long i = 0; i < per_batch; ++i) {
                Vec x = drv.draw_x(rng);
                double r = drv.draw_r(rng);
                Vec u = drv.draw_u(rng);
                double w = drv.pair_weight(r);
                // antithetic pair in u
                double contrib = 0.0;
                for (int s = 0; s < 2; ++s) {
                    Vec y = s == 0 ? x + u * r : x - u * r;
                    contrib += 0.5 * factor(x, y);
                }
                sum += contrib * w;
            }
            batch_mean[static_cast<size_t>(b)] = sum / static_cast<double>(per_batch);
        } catch (...) {
            errs[static_cast<size_t>(b)] = std::current_exception();
        }
    });
    for (auto& ep : errs)
        if (ep) std::rethrow_exception(ep);

    double mean = 0.0;
    for (double m : batch_mean) mean += m;
    mean /= kBatches;
    double var = 0.0;
    for (double m : batch_mean) var += (m - mean) * (m - mean);
    var /= (kBatches - 1);
    McResult out;
    out.estimate = mean;
    out.std_error = std::sqrt(var / kBatches);
    out.samples = per_batch * kBatches;
    return out;
}

} // namespace

McResult mc_double_integral(const Indicator& in_a, const Indicator& in_b, double sigma,
                            const Box& box, const QuadratureSpec& spec) {
    McDriver drv(sigma, box);
    const double inv_alpha = 1.0 / specfun::unit_ball_volume(box.dim() - 1);
    McResult res = mc_run(drv, spec, [&](const Vec& x, const Vec& y) -> double {
        return (in_a(x) && in_b(y)) ? 1.0 : 0.0;
    });
    res.estimate *= inv_alpha;
    res.std_error *= inv_alpha;
    return res;
}

McResult sigma_area(const Scene& scene, const Indicator& omega, double sigma,
                    const Box& box, const QuadratureSpec& spec) {
    McDriver drv(sigma, box);
    const double pref = 0.5 / specfun::unit_ball_volume(box.dim() - 1);
    McResult res = mc_run(drv, spec, [&](const Vec& x, const Vec& y) -> double {
        if (!omega(x) && !omega(y)) return 0.0;
        bool odd;
        try {
            odd = segment_parity_odd(scene, x, y);
        } catch (const Error&) {
            return 0.0; // measure-zero grazing configurations
        }
        if (!odd) return 0.0;
        // pairs with y outside the box are counted twice: the symmetric
        // (x', y') = (y, x) configuration is never drawn since x' is
        // outside the sampling box
        return drv.in_box(y) ? 1.0 : 2.0;
    });
    res.estimate *= pref;
    res.std_error *= pref;
    return res;
}

McResult sigma_perimeter(const Indicator& in_e, const Indicator& omega, double sigma,
                         const Box& box, const QuadratureSpec& spec) {
    auto not_e = [&](const Vec& p) { return !in_e(p); };
    auto e_and_omega = [&](const Vec& p) { return in_e(p) && omega(p); };
    auto ce_and_omega = [&](const Vec& p) { return !in_e(p) && omega(p); };
    auto ce_and_comega = [&](const Vec& p) { return !in_e(p) && !omega(p); };
    auto e_and_comega = [&](const Vec& p) { return in_e(p) && !omega(p); };
    (void)not_e;

    QuadratureSpec term_spec = spec;
    term_spec.mc_samples = std::max<long long>(32, spec.mc_samples / 3);
    term_spec.rng_seed = substream_seed(spec.rng_seed, 101);
    McResult t1 = mc_double_integral(e_and_omega, ce_and_omega, sigma, box, term_spec);
    term_spec.rng_seed = substream_seed(spec.rng_seed, 102);
    McResult t2 = mc_double_integral(e_and_omega, ce_and_comega, sigma, box, term_spec);
    term_spec.rng_seed = substream_seed(spec.rng_seed, 103);
    McResult t3 = mc_double_integral(e_and_comega, ce_and_omega, sigma, box, term_spec);

    McResult out;
    out.estimate = t1.estimate + t2.estimate + t3.estimate;
    out.std_error = std::sqrt(t1.std_error * t1.std_error + t2.std_error * t2.std_error +
                              t3.std_error * t3.std_error);
    out.samples = t1.samples + t2.samples + t3.samples;
    return out;
}

} // namespace nlcurv

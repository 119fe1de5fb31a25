#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nlcurv/surface.hpp"
#include "nlcurv/vec.hpp"

namespace nlcurv {

struct QuadratureSpec {
    double eps_cutoff = 1e-4;  // brute-force cutoff mode only
    double r_max = 0.0;        // <= 0: use 1e4 * scene scale
    int n_phi = 512;           // angular nodes per half-plane
    int n_dir = 256;           // directions on the tangent sphere
    long long mc_samples = 1'000'000;
    uint64_t rng_seed = 0x9e3779b9;
    enum class Tail { analytic, truncate } tail = Tail::analytic;

    double effective_r_max(double scene_scale) const;
    void validate(double scene_scale) const;
};

/// Sign pattern of the classifier along one ray: s0 on (0, r[0]), flipping at
/// each transversal crossing.
struct RadialPiecewise {
    int s0 = 1;
    std::vector<double> r;  // sorted crossing radii
    double sigma = 0.5;
};

struct RadialPV {
    double finite_part = 0.0;      // everything not multiplying eps^{-sigma}
    double divergence_coeff = 0.0; // coefficient of eps^{-sigma}
};

/// Closed-form radial integral of s(r) r^{-1-sigma} over (eps, r_max), split
/// into the finite part and the symbolic eps^{-sigma} coefficient. With the
/// analytic tail the constant-sign integral beyond r_max is restored exactly.
RadialPV radial_pv(const RadialPiecewise& rp, double weight, double r_max,
                   QuadratureSpec::Tail tail);

/// Angular node on (0, pi) stored as the distance from pi/2 (where the
/// radial integrals blow up like delta^{-sigma}); weight carries dphi.
struct AngularNode {
    double delta;
    double weight;
};

/// Double-exponential nodes for one half of (0, pi); the full grid is the
/// mirrored union, symmetric about pi/2 by construction.
std::vector<AngularNode> angular_nodes(int m);

struct QuadDiagnostics {
    double tail_bound = 0.0;
    double cancel_residual = 0.0;
    int n_nodes = 0;
    bool truncation_warning = false;
};

/// k_{sigma,e}-type half-plane PV integral: per angular node, the closed-form
/// radial integral along the ray cos(phi) n + sin(phi) e, with the
/// eps^{-sigma} coefficients cancelled exactly across the phi <-> pi - phi
/// node pairs. Throws CancellationFailure when a node stays tangential after
/// jittering or the symbolic divergence fails to vanish.
double halfplane_pv_integral(const Scene& scene, const Vec& z, const TangentFrame& frame,
                             const Vec& e, double sigma, const QuadratureSpec& spec,
                             QuadDiagnostics* diag = nullptr);

/// Cross-check oracle: the same integral with an explicit eps cutoff,
/// Richardson-extrapolated to eps -> 0 over a ladder of cutoffs.
double halfplane_pv_bruteforce(const Scene& scene, const Vec& z, const TangentFrame& frame,
                               const Vec& e, double sigma, const QuadratureSpec& spec);

/// Full-sphere PV scan about z: visits every direction u of the grid with
/// value = node weight * closed-form radial finite part (divergences cancel
/// over antipodal node pairs). Visits run serially in grid order.
void fullsphere_pv_scan(const Scene& scene, const Vec& z, const TangentFrame& frame,
                        double sigma, const QuadratureSpec& spec,
                        const std::function<void(const Vec& u, double value)>& visit,
                        QuadDiagnostics* diag = nullptr);

/// Accumulating kernel for mesh surface integrals: receives the sample point,
/// the signed normal of A_i(z) there, and the area weight.
using SurfaceKernel =
    std::function<void(const Vec& y, const Vec& n_ai, double area_w, double* acc)>;

/// Triangle-wise quadrature (6-point order-4 rule) over a mesh scene, with
/// 4-fold subdivision of triangles near z until the kernel varies < 1% per
/// sub-triangle. acc must hold n_acc doubles, zeroed by the callee.
void surface_integral(const TriMeshScene& scene, const Vec& z, const Vec& n_z,
                      int n_acc, const SurfaceKernel& kernel, const QuadratureSpec& spec,
                      double* acc);

struct Box {
    Vec lo;
    Vec hi;
    int dim() const { return lo.n; }
    double diameter() const { return (hi - lo).norm(); }
    double volume() const {
        double v = 1.0;
        for (int i = 0; i < lo.n; ++i) v *= hi[i] - lo[i];
        return v;
    }
};

struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;
    long long samples = 0;
};

using Indicator = std::function<bool(const Vec&)>;

/// Interaction functional I(A,B) = (1/alpha_{n-1}) int_A int_B |x-y|^{-n-sigma}.
/// x is drawn uniformly in box (which must contain A); y = x + r u with
/// r ~ r^{n-1-sigma} on (r_min, r_box). Pair separations outside that range
/// are truncated identically across estimators sharing the box.
McResult mc_double_integral(const Indicator& in_a, const Indicator& in_b, double sigma,
                            const Box& box, const QuadratureSpec& spec);

/// sigma-Area(S, Omega) over odd-parity pairs; box must contain Omega and S.
McResult sigma_area(const Scene& scene, const Indicator& omega, double sigma,
                    const Box& box, const QuadratureSpec& spec);

/// sigma-Per(E, Omega) as the three-term interaction sum; box must contain E
/// and Omega.
McResult sigma_perimeter(const Indicator& in_e, const Indicator& omega, double sigma,
                         const Box& box, const QuadratureSpec& spec);

} // namespace nlcurv

#pragma once

#include <Eigen/Dense>
#include <array>

#include "nlcurv/gridfield.hpp"
#include "nlcurv/vec.hpp"

namespace nlcurv::fracops {

/// Closed-form fractional Hessian kernel at offset v:
/// (-nu_{a+b}/(a+b)) |v|^{-n-a-b} ((n+a+b) v (x) v / |v|^2 - 1).
Eigen::MatrixXd frac_kernel_tensor(const Vec& v, double alpha, double beta);

/// grad^alpha f = mu_alpha PV int f(y) (y-x)/|x-y|^{n+alpha+1} dy on the
/// lattice: cell-averaged kernel table (odd, so the PV and the tail vanish
/// by symmetry) plus an analytic grad-f correction over the singular cell.
GridField frac_gradient(const GridField& f, double alpha);

/// div^alpha w = mu_alpha int (w(y)-w(x)).(y-x)/|x-y|^{n+alpha+1} dy;
/// computed as the trace of the gradient path applied per component, which
/// makes tr(grad^alpha w) = div^alpha w exact on the lattice.
GridField frac_divergence(const GridField& w, double alpha);

/// (-Delta)^{alpha/2} f = nu_alpha int (f(y)-f(x))/|x-y|^{n+alpha} dy,
/// alpha in (0,2): cell-averaged kernel, analytic constant tail against
/// -f(x), Hessian-trace correction over the singular cell.
GridField frac_laplacian(const GridField& f, double alpha);

/// Single-integral fractional Hessian,
/// int (f(x+v)-f(x)) K_{alpha+beta}(v) dv with the frac_kernel_tensor kernel.
GridField frac_hessian_direct(const GridField& f, double alpha, double beta);

struct KernelCheckResult {
    Eigen::MatrixXd lhs; // numeric double-singular integral
    Eigen::MatrixXd rhs; // closed form via frac_kernel_tensor / (mu_a mu_b)
    double rel_err;
};

/// Checks int (v-u) (x) u / (|u-v|^{n+beta+1} |u|^{n+alpha+1}) du against its
/// closed form (n = 2). PV exclusions of radius 1e-3 |v| at u = 0 and u = v
/// with analytic leading-order ball corrections; `resolution` scales the
/// quadrature node counts (1 = default).
KernelCheckResult hessian_kernel_identity_check(const Vec& v, double alpha, double beta,
                                                int resolution = 1);

double gauss_weierstrass(double t, const Vec& u);

struct PairCheck {
    double numeric;
    double closed_form;
};

/// Lattice convolution int u^gamma g_s(v-u) g_t(u) du versus the closed form
/// ((t v)/(s+t))^gamma g_{s+t}(v), plus 2st/(s+t) g_{s+t}(v) when gamma is a
/// doubled index.
PairCheck gw_convolution_check(const std::array<int, 3>& gamma, double s, double t,
                               const Vec& v, int grid_n = 256);

/// pi^{n/2} / (2^{alpha+1} Gamma((n+alpha+1)/2))
double gw_prefactor(int n, double alpha);

/// gw_prefactor * int_0^inf g_t(u) t^{-(alpha+3)/2} dt versus |u|^{-n-alpha-1}.
PairCheck gw_subordination_check(double alpha, const Vec& u);

/// The +1/-1 inside/outside classifier of the |x| <= radius ball, mollified
/// linearly over one lattice cell (value 0 on the sphere). Compact decay
/// class. Field is constant -1 (not 0) far out, which the operators
/// annihilate exactly.
GridField ball_indicator_field(int n, int N, double L, double radius);

} // namespace nlcurv::fracops

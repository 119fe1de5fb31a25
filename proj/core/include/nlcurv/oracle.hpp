#pragma once

#include <Eigen/Dense>

#include "nlcurv/gridfield.hpp"
#include "nlcurv/vec.hpp"

namespace nlcurv::oracle {

/// Closed-form nonlocal directional curvature of the radius-rho sphere in
/// R^n: the value is direction independent and negative with the outward
/// orientation.
double sphere_k(int n, double rho, double sigma);

/// k * identity on an (n-1)-dimensional tangent space.
Eigen::MatrixXd sphere_L(int n, double rho, double sigma);

inline double sphere_H(int n, double rho, double sigma) { return sphere_k(n, rho, sigma); }

/// Intersection of the sphere through z (radius rho, inward normal -n_z
/// curvature side) with the radius-r circle about z in the (e, n_z) plane,
/// and its polar angle in that chart. Requires 0 < r < 2 rho.
struct SphereChartPoint {
    Vec p;
    double phi;
};
SphereChartPoint sphere_geometry(double r, double rho, const Vec& z, const Vec& e,
                                 const Vec& n_z);

enum class SpectralSymbol { laplacian, gradient, divergence };

/// Fourier-multiplier fractional operator on the periodic extension of the
/// field: |2 pi xi|^alpha for the Laplacian, with an extra i xi_j / |xi|
/// factor per component for gradient / divergence. Independent of the
/// lattice-sum implementation in fracops; used as its oracle.
/// Throws PeriodizationError when the field is visibly nonperiodic
/// (boundary magnitude > 1e-8 * max).
GridField spectral_frac_op(const GridField& f, SpectralSymbol symbol, double alpha);

} // namespace nlcurv::oracle

#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "nlcurv/quadrature.hpp"
#include "nlcurv/surface.hpp"

namespace nlcurv {

/// Symmetric tensor on T_z S, stored as an (n-1)x(n-1) matrix in the frame's
/// tangent basis. As an ambient tensor it annihilates the normal by
/// construction.
struct SymTangentTensor {
    TangentFrame frame;
    Eigen::MatrixXd m;
    double sym_residual = 0.0;

    double trace() const { return m.trace(); }
    double det() const { return m.determinant(); }
    /// Lift to ambient coordinates (n x n, normal direction in the kernel).
    Eigen::Matrix3d ambient(int n) const;
};

enum class TensorRepresentation { angular, fullspace, surface };

/// k_{sigma,e} over a direction grid on U(T_z S), with the quadrature weights
/// of the grid (summing to omega_{n-2}).
struct DirectionalSamples {
    TangentFrame frame;
    std::vector<Vec> dirs;            // ambient unit tangent vectors
    std::vector<double> in_frame;     // packed (n-1)-component frame coords
    std::vector<double> weights;
    std::vector<double> k;
    double sigma = 0.0;
};

double directional_curvature(const Scene& scene, const Vec& z, const Vec& e, double sigma,
                             const QuadratureSpec& spec);

DirectionalSamples sample_directional(const Scene& scene, const Vec& z, double sigma,
                                      const QuadratureSpec& spec);

/// H_sigma via the full-space PV integral (spherical scan about z).
double mean_curvature_volume(const Scene& scene, const Vec& z, double sigma,
                             const QuadratureSpec& spec);

/// H_sigma as the direction average of k_{sigma,e}.
double mean_curvature_avg(const DirectionalSamples& samples);

/// H_sigma via the surface representation (mesh scenes only).
double mean_curvature_surface(const TriMeshScene& scene, const Vec& z, double sigma,
                              const QuadratureSpec& spec);

SymTangentTensor curvature_tensor(const Scene& scene, const Vec& z, double sigma,
                                  const QuadratureSpec& spec, TensorRepresentation rep);

/// Angular representation from precomputed samples (shares the k grid with
/// mean_curvature_avg, making the trace identity exact to rounding).
SymTangentTensor curvature_tensor_from_samples(const DirectionalSamples& samples);

double gaussian_curvature(const SymTangentTensor& L);

/// n = 3 double-integral form of det L_sigma over pairs of tangent
/// directions.
double gaussian_curvature_double_integral(const DirectionalSamples& samples);

/// Classical reconstruction from classical directional curvatures k_e given
/// on a direction grid.
SymTangentTensor classical_reconstruction(const DirectionalSamples& k_samples, int n);

struct LimitResult {
    double value = 0.0;
    double residual = 0.0;
};

/// Richardson/Neville extrapolation of (1-sigma) * value to sigma -> 1 in the
/// variable 1 - sigma. Throws NonConvergent when the tableau disagrees by
/// more than 10%.
LimitResult sigma_to_one_limit(const std::vector<std::pair<double, double>>& values);

struct CurvatureReport {
    Vec z;
    double sigma = 0.0;
    DirectionalSamples samples;
    double H_volume = 0.0;
    double H_avg = 0.0;
    SymTangentTensor L;
    double K = 0.0;
    double trace_residual = 0.0; // |H_avg - tr L/(n-1)|
    QuadDiagnostics diag;
};

CurvatureReport curvature_report(const Scene& scene, const Vec& z, double sigma,
                                 const QuadratureSpec& spec);

} // namespace nlcurv

#include "nlcurv/curvature.hpp"

#include <cmath>
#include <numbers>

#include "nlcurv/errors.hpp"
#include "nlcurv/specfun.hpp"

namespace nlcurv {

namespace {
constexpr double kPi = std::numbers::pi;

double omega_nm2(int n) { return specfun::unit_sphere_measure(n - 2); }

Eigen::MatrixXd symmetrize(Eigen::MatrixXd m, double* residual) {
    Eigen::MatrixXd s = 0.5 * (m + m.transpose());
    *residual = (m - s).cwiseAbs().maxCoeff();
    return s;
}
} // namespace

Eigen::Matrix3d SymTangentTensor::ambient(int n) const {
    Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
    const int d = n - 1;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    out(a, b) += m(i, j) * frame.tangent[static_cast<size_t>(i)][a] *
                                 frame.tangent[static_cast<size_t>(j)][b];
        }
    }
    return out;
}

double directional_curvature(const Scene& scene, const Vec& z, const Vec& e, double sigma,
                             const QuadratureSpec& spec) {
    TangentFrame frame = tangent_frame(scene, z);
    return halfplane_pv_integral(scene, z, frame, e, sigma, spec);
}

DirectionalSamples sample_directional(const Scene& scene, const Vec& z, double sigma,
                                      const QuadratureSpec& spec) {
    DirectionalSamples out;
    out.frame = tangent_frame(scene, z);
    out.sigma = sigma;
    const int n = scene.dim();
    if (n == 2) {
        out.dirs = {out.frame.tangent[0], -out.frame.tangent[0]};
        out.in_frame = {1.0, -1.0};
        out.weights = {1.0, 1.0}; // omega_0 = 2: two unit vectors, weight 1 each
    } else {
        const int n_psi = std::max(8, spec.n_dir);
        const double w = 2.0 * kPi / n_psi;
        for (int j = 0; j < n_psi; ++j) {
            double psi = 2.0 * kPi * (j + 0.5) / n_psi;
            double cp = std::cos(psi), sp = std::sin(psi);
            out.dirs.push_back(out.frame.tangent[0] * cp + out.frame.tangent[1] * sp);
            out.in_frame.push_back(cp);
            out.in_frame.push_back(sp);
            out.weights.push_back(w);
        }
    }
    out.k.resize(out.dirs.size());
    for (size_t i = 0; i < out.dirs.size(); ++i)
        out.k[i] = halfplane_pv_integral(scene, z, out.frame, out.dirs[i], sigma, spec);
    return out;
}

double mean_curvature_volume(const Scene& scene, const Vec& z, double sigma,
                             const QuadratureSpec& spec) {
    TangentFrame frame = tangent_frame(scene, z);
    double sum = 0.0;
    fullsphere_pv_scan(scene, z, frame, sigma, spec,
                       [&](const Vec&, double v) { sum += v; });
    return sum / omega_nm2(scene.dim());
}

double mean_curvature_avg(const DirectionalSamples& s) {
    double num = 0.0;
    for (size_t i = 0; i < s.k.size(); ++i) num += s.weights[i] * s.k[i];
    const int n = s.frame.n_tangents + 1;
    return num / omega_nm2(n);
}

double mean_curvature_surface(const TriMeshScene& scene, const Vec& z, double sigma,
                              const QuadratureSpec& spec) {
    const Vec n_z = scene.orientation_normal(z);
    const double p = 3.0 + sigma;
    double acc = 0.0;
    surface_integral(
        scene, z, n_z, 1,
        [&](const Vec& y, const Vec& n_ai, double w, double* a) {
            Vec d = z - y;
            double r = d.norm();
            a[0] += w * d.dot(n_ai) * std::pow(r, -p);
        },
        spec, &acc);
    return 2.0 * acc / (sigma * omega_nm2(3));
}

SymTangentTensor curvature_tensor_from_samples(const DirectionalSamples& s) {
    const int n = s.frame.n_tangents + 1;
    const int d = n - 1;
    SymTangentTensor out;
    out.frame = s.frame;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
    for (size_t i = 0; i < s.k.size(); ++i) {
        Eigen::VectorXd e(d);
        for (int c = 0; c < d; ++c) e(c) = s.in_frame[i * static_cast<size_t>(d) + static_cast<size_t>(c)];
        m += s.weights[i] * s.k[i] * ((n + s.sigma) * e * e.transpose() - eye);
    }
    m *= (n - 1) / ((1.0 + s.sigma) * omega_nm2(n));
    out.m = symmetrize(std::move(m), &out.sym_residual);
    return out;
}

namespace {

SymTangentTensor tensor_fullspace(const Scene& scene, const Vec& z, double sigma,
                                  const QuadratureSpec& spec) {
    const int n = scene.dim();
    const int d = n - 1;
    SymTangentTensor out;
    out.frame = tangent_frame(scene, z);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
    fullsphere_pv_scan(scene, z, out.frame, sigma, spec, [&](const Vec& u, double v) {
        // tangential part of the ray direction; rays along +-n(z) carry only
        // the -1 term (the e x e set there has measure zero)
        Vec tang = u - out.frame.normal * u.dot(out.frame.normal);
        double tn = tang.norm();
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
        bool has_dir = tn > 1e-6;
        if (has_dir)
            for (int c = 0; c < d; ++c) e(c) = tang.dot(out.frame.tangent[static_cast<size_t>(c)]) / tn;
        if (has_dir)
            m += v * ((n + sigma) * e * e.transpose() - eye);
        else
            m -= v * eye;
    });
    m *= (n - 1) / ((1.0 + sigma) * omega_nm2(n));
    out.m = symmetrize(std::move(m), &out.sym_residual);
    return out;
}

SymTangentTensor tensor_surface(const Scene& scene, const Vec& z, double sigma,
                                const QuadratureSpec& spec) {
    const auto* ms = dynamic_cast<const TriMeshScene*>(&scene);
    if (!ms)
        throw RepresentationUnavailable("surface representation requires a mesh scene");
    const int n = 3, d = 2;
    SymTangentTensor out;
    out.frame = tangent_frame(scene, z);
    const double p = n + sigma;
    // acc = {m00, m01, m11 of the e x e part, isotropic part}
    double acc[4] = {0, 0, 0, 0};
    surface_integral(
        *ms, z, out.frame.normal, 4,
        [&](const Vec& y, const Vec& n_ai, double w, double* a) {
            Vec dzy = z - y;
            double r = dzy.norm();
            double g = w * dzy.dot(n_ai) * std::pow(r, -p);
            Vec tang = (y - z) - out.frame.normal * (y - z).dot(out.frame.normal);
            double tn = tang.norm();
            if (tn > 1e-12 * r) {
                double e0 = tang.dot(out.frame.tangent[0]) / tn;
                double e1 = tang.dot(out.frame.tangent[1]) / tn;
                a[0] += g * e0 * e0;
                a[1] += g * e0 * e1;
                a[2] += g * e1 * e1;
            }
            a[3] += g;
        },
        spec, acc);
    Eigen::MatrixXd m(d, d);
    m(0, 0) = p * acc[0] - acc[3];
    m(0, 1) = p * acc[1];
    m(1, 0) = p * acc[1];
    m(1, 1) = p * acc[2] - acc[3];
    m *= 2.0 * (n - 1) / ((1.0 + sigma) * sigma * omega_nm2(n));
    out.m = symmetrize(std::move(m), &out.sym_residual);
    return out;
}

} // namespace

SymTangentTensor curvature_tensor(const Scene& scene, const Vec& z, double sigma,
                                  const QuadratureSpec& spec, TensorRepresentation rep) {
    switch (rep) {
        case TensorRepresentation::angular:
            return curvature_tensor_from_samples(sample_directional(scene, z, sigma, spec));
        case TensorRepresentation::fullspace:
            return tensor_fullspace(scene, z, sigma, spec);
        case TensorRepresentation::surface:
            return tensor_surface(scene, z, sigma, spec);
    }
    throw ConfigError("unknown tensor representation");
}

double gaussian_curvature(const SymTangentTensor& L) { return L.det(); }

double gaussian_curvature_double_integral(const DirectionalSamples& s) {
    const int n = s.frame.n_tangents + 1;
    if (n != 3) throw DomainError("double-integral Gaussian curvature needs n = 3");
    const double sg = s.sigma;
    double sum = 0.0;
    const size_t m = s.k.size();
    for (size_t i = 0; i < m; ++i) {
        double ci = s.in_frame[2 * i], si = s.in_frame[2 * i + 1];
        for (size_t j = 0; j < m; ++j) {
            double cj = s.in_frame[2 * j], sj = s.in_frame[2 * j + 1];
            double cross = ci * sj - si * cj; // sin of the angle between them
            double bracket = (3.0 + sg) * (3.0 + sg) * cross * cross - 2.0 * (2.0 + sg);
            sum += s.weights[i] * s.weights[j] * s.k[i] * s.k[j] * bracket;
        }
    }
    return sum / (2.0 * (1.0 + sg) * (1.0 + sg) * kPi * kPi);
}

SymTangentTensor classical_reconstruction(const DirectionalSamples& s, int n) {
    const int d = n - 1;
    SymTangentTensor out;
    out.frame = s.frame;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
    for (size_t i = 0; i < s.k.size(); ++i) {
        Eigen::VectorXd e(d);
        for (int c = 0; c < d; ++c) e(c) = s.in_frame[i * static_cast<size_t>(d) + static_cast<size_t>(c)];
        m += s.weights[i] * s.k[i] * ((n + 1.0) * e * e.transpose() - eye);
    }
    m *= (n - 1) / (2.0 * omega_nm2(n));
    out.m = symmetrize(std::move(m), &out.sym_residual);
    return out;
}

LimitResult sigma_to_one_limit(const std::vector<std::pair<double, double>>& values) {
    if (values.size() < 2) throw ConfigError("limit extrapolation needs >= 2 sigma values");
    std::vector<double> x, y;
    for (const auto& [sigma, v] : values) {
        x.push_back(1.0 - sigma);
        y.push_back((1.0 - sigma) * v);
    }
    // Neville tableau at x = 0; track the last two diagonal entries.
    std::vector<double> p = y;
    const size_t m = p.size();
    double prev = p[0];
    for (size_t lev = 1; lev < m; ++lev) {
        if (lev + 1 == m) prev = p[0];
        for (size_t i = 0; i + lev < m; ++i)
            p[i] = (x[i + lev] * p[i] - x[i] * p[i + 1]) / (x[i + lev] - x[i]);
    }
    LimitResult out;
    out.value = p[0];
    out.residual = std::abs(p[0] - prev);
    if (out.residual > 0.10 * std::abs(out.value))
        throw NonConvergent("sigma -> 1 extrapolants disagree by more than 10%");
    return out;
}

CurvatureReport curvature_report(const Scene& scene, const Vec& z, double sigma,
                                 const QuadratureSpec& spec) {
    CurvatureReport rep;
    rep.z = z;
    rep.sigma = sigma;
    rep.samples = sample_directional(scene, z, sigma, spec);
    rep.H_avg = mean_curvature_avg(rep.samples);
    rep.H_volume = mean_curvature_volume(scene, z, sigma, spec);
    rep.L = curvature_tensor_from_samples(rep.samples);
    rep.K = gaussian_curvature(rep.L);
    rep.trace_residual =
        std::abs(rep.H_avg - rep.L.trace() / (scene.dim() - 1));
    return rep;
}

} // namespace nlcurv

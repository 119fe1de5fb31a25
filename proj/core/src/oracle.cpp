#include "nlcurv/oracle.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <vector>

#include <fftw3.h>

#include "nlcurv/errors.hpp"
#include "nlcurv/specfun.hpp"

namespace nlcurv::oracle {

double sphere_k(int n, double rho, double sigma) {
    if (n < 2 || rho <= 0.0 || sigma <= 0.0 || sigma >= 1.0)
        throw DomainError("sphere_k: need n >= 2, rho > 0, sigma in (0,1)");
    return -specfun::beta((1.0 - sigma) / 2.0, (n - 1) / 2.0) /
           (sigma * std::pow(2.0 * rho, sigma));
}

Eigen::MatrixXd sphere_L(int n, double rho, double sigma) {
    return sphere_k(n, rho, sigma) * Eigen::MatrixXd::Identity(n - 1, n - 1);
}

SphereChartPoint sphere_geometry(double r, double rho, const Vec& z, const Vec& e,
                                 const Vec& n_z) {
    if (!(r > 0.0 && r < 2.0 * rho)) throw DomainError("sphere_geometry: need 0 < r < 2 rho");
    const double q = r / (2.0 * rho);
    const double root = std::sqrt(1.0 - q * q);
    SphereChartPoint out;
    out.p = z + e * (r * root) - n_z * (r * r / (2.0 * rho));
    out.phi = std::numbers::pi - std::atan(root / q);
    return out;
}

namespace {

std::mutex fftw_mutex; // fftw planning is not thread-safe

struct Dft {
    int n, N;
    std::vector<std::complex<double>> buf;

    Dft(int n_, int N_) : n(n_), N(N_), buf(1) {
        std::size_t total = 1;
        for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(N);
        buf.assign(total, {0.0, 0.0});
    }

    void run(int sign) {
        std::vector<int> dims(static_cast<std::size_t>(n), N);
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lock(fftw_mutex);
            plan = fftw_plan_dft(n, dims.data(), reinterpret_cast<fftw_complex*>(buf.data()),
                                 reinterpret_cast<fftw_complex*>(buf.data()), sign,
                                 FFTW_ESTIMATE);
        }
        fftw_execute(plan);
        std::lock_guard<std::mutex> lock(fftw_mutex);
        fftw_destroy_plan(plan);
    }
};

// signed frequency index, row-major flat index -> per-axis k in [-N/2, N/2)
void freq_of(std::size_t flat, int n, int N, double L, double* xi) {
    std::size_t rem = flat;
    for (int d = 0; d < n; ++d) {
        int k = static_cast<int>(rem % static_cast<std::size_t>(N));
        rem /= static_cast<std::size_t>(N);
        if (k > N / 2) k -= N;
        xi[d] = k / L;
    }
}

} // namespace

GridField spectral_frac_op(const GridField& f, SpectralSymbol symbol, double alpha) {
    if (f.decay.cls == DecayClass::algebraic)
        throw PeriodizationError("algebraic-decay fields are not periodizable");
    if (f.boundary_max_abs() > 1e-8 * f.max_abs())
        throw PeriodizationError("field magnitude at the box boundary exceeds 1e-8 * max");
    const int in_comp = (symbol == SpectralSymbol::divergence) ? f.n : 1;
    if (f.ncomp != in_comp)
        throw ConfigError("spectral_frac_op: field has wrong component count for symbol");
    const int out_comp = (symbol == SpectralSymbol::gradient) ? f.n : 1;

    GridField out;
    out.n = f.n;
    out.N = f.N;
    out.L = f.L;
    out.ncomp = out_comp;
    out.decay = f.decay;
    out.data.assign(f.nodes() * static_cast<std::size_t>(out_comp), 0.0);

    const std::size_t total = f.nodes();
    const double two_pi = 2.0 * std::numbers::pi;
    const double inv_total = 1.0 / static_cast<double>(total);

    std::vector<Dft> hats;
    for (int c = 0; c < in_comp; ++c) {
        Dft d(f.n, f.N);
        for (std::size_t i = 0; i < total; ++i) d.buf[i] = f.at(i, c);
        d.run(FFTW_FORWARD);
        hats.push_back(std::move(d));
    }

    for (int oc = 0; oc < out_comp; ++oc) {
        Dft acc(f.n, f.N);
        for (std::size_t i = 0; i < total; ++i) {
            double xi[3] = {0, 0, 0};
            freq_of(i, f.n, f.N, f.L, xi);
            double m2 = 0.0;
            for (int d = 0; d < f.n; ++d) m2 += xi[d] * xi[d];
            const double mod = two_pi * std::sqrt(m2);
            if (mod == 0.0) {
                acc.buf[i] = 0.0;
                continue;
            }
            switch (symbol) {
                case SpectralSymbol::laplacian:
                    acc.buf[i] = hats[0].buf[i] * std::pow(mod, alpha);
                    break;
                case SpectralSymbol::gradient:
                    acc.buf[i] = hats[0].buf[i] * std::complex<double>(0.0, two_pi * xi[oc]) *
                                 std::pow(mod, alpha - 1.0);
                    break;
                case SpectralSymbol::divergence: {
                    std::complex<double> s = 0.0;
                    for (int c = 0; c < in_comp; ++c)
                        s += hats[static_cast<std::size_t>(c)].buf[i] *
                             std::complex<double>(0.0, two_pi * xi[c]);
                    acc.buf[i] = s * std::pow(mod, alpha - 1.0);
                    break;
                }
            }
        }
        acc.run(FFTW_BACKWARD);
        for (std::size_t i = 0; i < total; ++i) out.at(i, oc) = acc.buf[i].real() * inv_total;
    }
    return out;
}

} // namespace nlcurv::oracle

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "nlcurv/vec.hpp"

namespace nlcurv {

enum class DecayClass { gaussian, compact, algebraic };

struct Decay {
    DecayClass cls = DecayClass::gaussian;
    double exponent = 0.0; // algebraic only: |f| ~ |x|^{-exponent}
};

/// Scalar / vector / matrix field sampled on a uniform N^n lattice over the
/// centered box [-L/2, L/2]^n. Node i sits at x_i = -L/2 + i h, h = L/N, so
/// the lattice is exactly the sampling grid of the period-L extension.
struct GridField {
    int n = 1;
    int N = 0;
    double L = 0.0;
    int ncomp = 1; // 1 scalar, n vector, n*n matrix (row-major components)
    Decay decay{};
    std::vector<double> data; // node-major, ncomp components per node

    double h() const { return L / N; }
    double coord(int i) const { return -0.5 * L + i * h(); }
    std::size_t nodes() const;
    std::size_t idx(int i, int j = 0, int k = 0) const;
    Vec node_point(std::size_t flat) const;

    double& at(std::size_t flat, int c = 0) { return data[flat * ncomp + c]; }
    double at(std::size_t flat, int c = 0) const { return data[flat * ncomp + c]; }

    double max_abs() const;
    /// Largest |component| over nodes with any index 0 (the box boundary).
    double boundary_max_abs() const;

    static GridField sample(int n, int N, double L, int ncomp, Decay decay,
                            const std::function<void(const Vec&, double*)>& f);

    /// Writes <path>.bin (little-endian float64 payload) and <path>.json
    /// (sidecar with n, N, L, ncomp, decay).
    void save(const std::string& path_stem) const;
    static GridField load(const std::string& path_stem);

    /// CSV slice: 1D fields in full; 2D fields row by row; 3D fields the
    /// k = N/2 plane. Columns: coordinates, then components.
    void export_csv_slice(const std::string& path) const;
};

/// Relative L2 distance ||a - b|| / ||b|| over all components.
double l2_relative_error(const GridField& a, const GridField& b);

} // namespace nlcurv

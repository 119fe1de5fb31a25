#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <ostream>

namespace nlcurv {

// Point/direction in R^n, n in {1,2,3}. Fixed storage, runtime dimension.
struct Vec {
    std::array<double, 3> c{0.0, 0.0, 0.0};
    int n = 3;

    Vec() = default;
    Vec(double x, double y) : c{x, y, 0.0}, n(2) {}
    Vec(double x, double y, double z) : c{x, y, z}, n(3) {}

    static Vec zero(int dim) {
        Vec v;
        v.n = dim;
        return v;
    }
    static Vec axis(int dim, int k) {
        Vec v = zero(dim);
        v.c[static_cast<size_t>(k)] = 1.0;
        return v;
    }

    double operator[](int i) const { return c[static_cast<size_t>(i)]; }
    double& operator[](int i) { return c[static_cast<size_t>(i)]; }

    Vec operator+(const Vec& o) const {
        Vec r = *this;
        for (int i = 0; i < n; ++i) r.c[static_cast<size_t>(i)] += o.c[static_cast<size_t>(i)];
        return r;
    }
    Vec operator-(const Vec& o) const {
        Vec r = *this;
        for (int i = 0; i < n; ++i) r.c[static_cast<size_t>(i)] -= o.c[static_cast<size_t>(i)];
        return r;
    }
    Vec operator*(double s) const {
        Vec r = *this;
        for (int i = 0; i < n; ++i) r.c[static_cast<size_t>(i)] *= s;
        return r;
    }
    Vec operator-() const { return *this * -1.0; }
    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n; ++i) c[static_cast<size_t>(i)] += o.c[static_cast<size_t>(i)];
        return *this;
    }

    double dot(const Vec& o) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += c[static_cast<size_t>(i)] * o.c[static_cast<size_t>(i)];
        return s;
    }
    double squared_norm() const { return dot(*this); }
    double norm() const { return std::sqrt(squared_norm()); }

    Vec normalized() const {
        double m = norm();
        assert(m > 0.0);
        return *this * (1.0 / m);
    }

    // n == 3 only.
    Vec cross(const Vec& o) const {
        assert(n == 3 && o.n == 3);
        return Vec(c[1] * o.c[2] - c[2] * o.c[1],
                   c[2] * o.c[0] - c[0] * o.c[2],
                   c[0] * o.c[1] - c[1] * o.c[0]);
    }
};

inline Vec operator*(double s, const Vec& v) { return v * s; }

inline std::ostream& operator<<(std::ostream& os, const Vec& v) {
    os << "(";
    for (int i = 0; i < v.n; ++i) os << (i ? "," : "") << v[i];
    return os << ")";
}

} // namespace nlcurv

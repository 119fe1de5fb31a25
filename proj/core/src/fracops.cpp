#include "nlcurv/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "nlcurv/errors.hpp"
#include "nlcurv/parallel.hpp"
#include "nlcurv/specfun.hpp"

namespace nlcurv::fracops {

namespace {

constexpr double kPi = std::numbers::pi;

struct GLNode {
    double x, w;
};

// Gauss-Legendre on [-1,1], Newton on the recurrence.
const std::vector<GLNode>& gl_rule(int m) {
    static std::mutex mu;
    static std::map<int, std::vector<GLNode>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    std::vector<GLNode> r(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r[static_cast<size_t>(i)] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
    }
    auto [pos, ok] = cache.emplace(m, std::move(r));
    (void)ok;
    return pos->second;
}

// a * sum over the 2n faces of the cube [-a,a]^n of the face integral of f.
// Radial scaling v = t p turns homogeneous integrands into this times a
// rational factor (1/(deg+n) inside, -1/(deg+n) outside).
double face_sum(int n, double a, int pts, const std::function<double(const Vec&)>& f) {
    double total = 0.0;
    if (n == 1) {
        Vec p = Vec::zero(1);
        p[0] = a;
        total += f(p);
        p[0] = -a;
        total += f(p);
        return a * total;
    }
    const auto& g = gl_rule(pts);
    for (int axis = 0; axis < n; ++axis) {
        for (int sgn = -1; sgn <= 1; sgn += 2) {
            double facesum = 0.0;
            if (n == 2) {
                int other = 1 - axis;
                for (const auto& nd : g) {
                    Vec p = Vec::zero(2);
                    p[axis] = sgn * a;
                    p[other] = nd.x * a;
                    facesum += nd.w * a * f(p);
                }
            } else {
                int o1 = (axis + 1) % 3, o2 = (axis + 2) % 3;
                for (const auto& n1 : g) {
                    for (const auto& n2 : g) {
                        Vec p = Vec::zero(3);
                        p[axis] = sgn * a;
                        p[o1] = n1.x * a;
                        p[o2] = n2.x * a;
                        facesum += n1.w * n2.w * a * a * f(p);
                    }
                }
            }
            total += facesum;
        }
    }
    return a * total;
}

// int over the cube [-a,a]^n of |v|^{q-n} dv, q > 0.
double cube_radial(int n, double a, double q) {
    return face_sum(n, a, 48, [&](const Vec& p) { return std::pow(p.norm(), q - n); }) / q;
}

// 4th moments over the cube cell against |v|^{-n-s-2}, s in (0,2):
// A4 = int v_0^4 K, A22 = int v_0^2 v_1^2 K.
double cube_A4(int n, double a, double s) {
    return face_sum(n, a, 48,
                    [&](const Vec& p) {
                        return p[0] * p[0] * p[0] * p[0] * std::pow(p.norm(), -n - s - 2);
                    }) /
           (2.0 - s);
}
double cube_A22(int n, double a, double s) {
    return face_sum(n, a, 48,
                    [&](const Vec& p) {
                        return p[0] * p[0] * p[1] * p[1] * std::pow(p.norm(), -n - s - 2);
                    }) /
           (2.0 - s);
}

enum class KernelKind { grad, lap, hess };

int kernel_ncomp(KernelKind k, int n) {
    switch (k) {
        case KernelKind::grad: return n;
        case KernelKind::lap: return 1;
        case KernelKind::hess: return n * n;
    }
    return 1;
}

void eval_kernel(KernelKind kind, int n, double order, const Vec& v, double* out) {
    const double r2 = v.squared_norm();
    switch (kind) {
        case KernelKind::grad: {
            double c = std::pow(r2, -0.5 * (n + order + 1));
            for (int d = 0; d < n; ++d) out[d] = v[d] * c;
            break;
        }
        case KernelKind::lap:
            out[0] = std::pow(r2, -0.5 * (n + order));
            break;
        case KernelKind::hess: {
            double c = std::pow(r2, -0.5 * (n + order));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    out[i * n + j] = c * ((n + order) * v[i] * v[j] / r2 - (i == j ? 1.0 : 0.0));
            break;
        }
    }
}

/// Periodized cell-averaged kernel over one period of offsets. Offset index
/// oi in [0,N) per axis maps to the integer offset oi - N/2; entry values
/// are integrals of the kernel over the offset cell plus all its period-L
/// images (the Poisson-summation counterpart of the spectral symbol).
struct KernelTable {
    int n, N, ncomp;
    std::vector<double> w;
    std::vector<double> colsum; // per component, sum over all offsets

    double at(std::size_t flat, int c) const {
        return w[flat * static_cast<std::size_t>(ncomp) + static_cast<std::size_t>(c)];
    }
};

int nsym2_of(int n) { return n * (n + 1) / 2; }
int nsym3_of(int n) { return n * (n + 1) * (n + 2) / 6; }

// value plus, optionally, moments of the kernel about the cell center:
// m1[k] = int (v-c)_k K, m2 / m3 the sym-packed higher moments, one slot
// group per kernel component
void cell_integral(KernelKind kind, int n, double order, const Vec& center, double h, int pts,
                   double* acc, double* m1 = nullptr, double* m2 = nullptr,
                   double* m3 = nullptr) {
    const auto& g = gl_rule(pts);
    const int nc = kernel_ncomp(kind, n);
    const int nsym = nsym2_of(n);
    const int nsym3 = nsym3_of(n);
    std::vector<double> kv(static_cast<size_t>(nc));
    const double half = 0.5 * h;
    double dx[3] = {0, 0, 0};
    auto accum = [&](const Vec& v, double wgt) {
        eval_kernel(kind, n, order, v, kv.data());
        for (int c = 0; c < nc; ++c) {
            double kw = wgt * kv[static_cast<size_t>(c)];
            acc[c] += kw;
            if (m1)
                for (int k = 0; k < n; ++k) m1[c * n + k] += kw * dx[k];
            if (m2) {
                int p = 0;
                for (int k = 0; k < n; ++k)
                    for (int l = k; l < n; ++l, ++p) m2[c * nsym + p] += kw * dx[k] * dx[l];
            }
            if (m3) {
                int p = 0;
                for (int k = 0; k < n; ++k)
                    for (int l = k; l < n; ++l)
                        for (int m = l; m < n; ++m, ++p)
                            m3[c * nsym3 + p] += kw * dx[k] * dx[l] * dx[m];
            }
        }
    };
    if (n == 1) {
        for (const auto& a : g) {
            Vec v = Vec::zero(1);
            dx[0] = a.x * half;
            v[0] = center[0] + dx[0];
            accum(v, a.w * half);
        }
    } else if (n == 2) {
        for (const auto& a : g)
            for (const auto& b : g) {
                dx[0] = a.x * half;
                dx[1] = b.x * half;
                Vec v(center[0] + dx[0], center[1] + dx[1]);
                accum(v, a.w * b.w * half * half);
            }
    } else {
        for (const auto& a : g)
            for (const auto& b : g)
                for (const auto& d : g) {
                    dx[0] = a.x * half;
                    dx[1] = b.x * half;
                    dx[2] = d.x * half;
                    Vec v(center[0] + dx[0], center[1] + dx[1], center[2] + dx[2]);
                    accum(v, a.w * b.w * d.w * half * half * half);
                }
    }
}

std::shared_ptr<const KernelTable> build_table(KernelKind kind, int n, int N, double L,
                                               double order) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const KernelTable>> cache;
    std::ostringstream key;
    key << static_cast<int>(kind) << ":" << n << ":" << N << ":";
    key.precision(17);
    key << L << ":" << order;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key.str());
        if (it != cache.end()) return it->second;
    }

    auto tbl = std::make_shared<KernelTable>();
    tbl->n = n;
    tbl->N = N;
    tbl->ncomp = kernel_ncomp(kind, n);
    std::size_t total = 1;
    for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(N);
    tbl->w.assign(total * static_cast<std::size_t>(tbl->ncomp), 0.0);
    const int nsym = nsym2_of(n);
    const int nsym3 = nsym3_of(n);
    std::vector<double> mom1(total * static_cast<std::size_t>(tbl->ncomp * n), 0.0);
    std::vector<double> mom2(total * static_cast<std::size_t>(tbl->ncomp * nsym), 0.0);
    std::vector<double> mom3(total * static_cast<std::size_t>(tbl->ncomp * nsym3), 0.0);

    const double h = L / N;
    const bool odd_kernel = (kind == KernelKind::grad);
    const int M2 = (n == 3) ? 6 : 12; // image shells; all are >= L/2 away
    const double cover = (M2 + 0.5) * L;

    const int nc = tbl->ncomp;

    // Tail beyond the covered cube, per offset: the offset's far cells sit on
    // an L-spaced lattice, so their sum is (1/N^n) int_out K(v0 + w) dw.
    // Expanded to second order in v0 (|v0| <= L/2 << A); the derivative
    // integrals come from the homogeneity face decomposition, with the face
    // values differentiated by central differences (K is smooth at |w| = A).
    const double A = cover + 0.5 * h;
    std::vector<double> R0(static_cast<size_t>(nc), 0.0);
    std::vector<double> R1(static_cast<size_t>(n * nc), 0.0);
    std::vector<double> R2(static_cast<size_t>(n * n * nc), 0.0);
    {
        const double eps = 3e-5 * A;
        std::vector<double> k0(static_cast<size_t>(nc)), kp(static_cast<size_t>(nc)),
            km(static_cast<size_t>(nc)), t1(static_cast<size_t>(nc)), t2(static_cast<size_t>(nc)),
            t3(static_cast<size_t>(nc));
        auto face_point = [&](const Vec& p, double wgt) {
            eval_kernel(kind, n, order, p, k0.data());
            for (int c = 0; c < nc; ++c) R0[static_cast<size_t>(c)] += wgt * k0[static_cast<size_t>(c)];
            for (int d = 0; d < n; ++d) {
                Vec pp = p, pm = p;
                pp[d] += eps;
                pm[d] -= eps;
                eval_kernel(kind, n, order, pp, kp.data());
                eval_kernel(kind, n, order, pm, km.data());
                for (int c = 0; c < nc; ++c) {
                    R1[static_cast<size_t>(d * nc + c)] +=
                        wgt * (kp[static_cast<size_t>(c)] - km[static_cast<size_t>(c)]) / (2.0 * eps);
                    R2[static_cast<size_t>((d * n + d) * nc + c)] +=
                        wgt *
                        (kp[static_cast<size_t>(c)] - 2.0 * k0[static_cast<size_t>(c)] +
                         km[static_cast<size_t>(c)]) /
                        (eps * eps);
                }
                for (int e = d + 1; e < n; ++e) {
                    Vec q1 = p, q2 = p, q3 = p, q4 = p;
                    q1[d] += eps; q1[e] += eps;
                    q2[d] -= eps; q2[e] -= eps;
                    q3[d] += eps; q3[e] -= eps;
                    q4[d] -= eps; q4[e] += eps;
                    eval_kernel(kind, n, order, q1, kp.data());
                    eval_kernel(kind, n, order, q2, km.data());
                    eval_kernel(kind, n, order, q3, t1.data());
                    eval_kernel(kind, n, order, q4, t2.data());
                    for (int c = 0; c < nc; ++c) {
                        double mixed = (kp[static_cast<size_t>(c)] + km[static_cast<size_t>(c)] -
                                        t1[static_cast<size_t>(c)] - t2[static_cast<size_t>(c)]) /
                                       (4.0 * eps * eps);
                        R2[static_cast<size_t>((d * n + e) * nc + c)] += wgt * mixed;
                        R2[static_cast<size_t>((e * n + d) * nc + c)] += wgt * mixed;
                    }
                }
            }
        };
        const auto& g = gl_rule(48);
        if (n == 1) {
            Vec p = Vec::zero(1);
            p[0] = A;
            face_point(p, A);
            p[0] = -A;
            face_point(p, A);
        } else {
            for (int axis = 0; axis < n; ++axis)
                for (int sgn = -1; sgn <= 1; sgn += 2) {
                    if (n == 2) {
                        int other = 1 - axis;
                        for (const auto& nd : g) {
                            Vec p = Vec::zero(2);
                            p[axis] = sgn * A;
                            p[other] = nd.x * A;
                            face_point(p, nd.w * A * A);
                        }
                    } else {
                        int o1 = (axis + 1) % 3, o2 = (axis + 2) % 3;
                        for (const auto& n1 : g)
                            for (const auto& n2 : g) {
                                Vec p = Vec::zero(3);
                                p[axis] = sgn * A;
                                p[o1] = n1.x * A;
                                p[o2] = n2.x * A;
                                face_point(p, n1.w * n2.w * A * A * A);
                            }
                    }
                }
        }
        // int_out g = face_sum / (-(deg + n)) for homogeneous g of degree deg
        for (int c = 0; c < nc; ++c) R0[static_cast<size_t>(c)] /= order;
        for (auto& v : R1) v /= order + 1.0;
        for (auto& v : R2) v /= order + 2.0;
    }
    const double inv_total = 1.0 / static_cast<double>(total);
    auto tail_of = [&](const Vec& v0, double* out) {
        for (int c = 0; c < nc; ++c) {
            double s = R0[static_cast<size_t>(c)];
            for (int d = 0; d < n; ++d) {
                s += v0[d] * R1[static_cast<size_t>(d * nc + c)];
                for (int e = 0; e < n; ++e)
                    s += 0.5 * v0[d] * v0[e] * R2[static_cast<size_t>((d * n + e) * nc + c)];
            }
            out[c] += s * inv_total;
        }
    };
    auto mirror_of = [&](std::size_t flat, int* oi) {
        std::size_t rem_i = flat, mirror = 0, mult = 1;
        for (int d = 0; d < n; ++d) {
            oi[d] = static_cast<int>(rem_i % static_cast<std::size_t>(N)) - N / 2;
            int m = (N - (oi[d] + N / 2)) % N;
            mirror += static_cast<std::size_t>(m) * mult;
            mult *= static_cast<std::size_t>(N);
            rem_i /= static_cast<std::size_t>(N);
        }
        return mirror;
    };

    const int chunks = std::min<int>(64, static_cast<int>(total));
    parallel_for(chunks, [&](int chunk) {
        std::vector<double> kv(static_cast<size_t>(nc));
        for (std::size_t flat = static_cast<std::size_t>(chunk); flat < total;
             flat += static_cast<std::size_t>(chunks)) {
            int oi[3] = {0, 0, 0};
            std::size_t mirror = mirror_of(flat, oi);
            if (mirror < flat) continue; // filled from its partner below
            bool self_mirror = (mirror == flat);
            if (self_mirror && odd_kernel) continue; // exactly zero
            double* dst = tbl->w.data() + flat * static_cast<std::size_t>(nc);

            bool is_origin = true;
            for (int d = 0; d < n; ++d) is_origin = is_origin && oi[d] == 0;
            Vec v0 = Vec::zero(n);
            for (int d = 0; d < n; ++d) v0[d] = oi[d] * h;

            // m = 0 cell, quadrature refined toward the singularity; the
            // moments feed the difference-stencil fold below, which restores
            // the field variation the piecewise-constant product rule loses
            if (!is_origin) { // the PV cell is handled analytically
                double dist = v0.norm();
                int pts = dist < 3.0 * h ? 20 : (dist < 10.0 * h ? 10 : 4);
                cell_integral(kind, n, order, v0, h, pts, dst,
                              mom1.data() + flat * static_cast<std::size_t>(nc * n),
                              mom2.data() + flat * static_cast<std::size_t>(nc * nsym),
                              mom3.data() + flat * static_cast<std::size_t>(nc * nsym3));
            }

            // period images, per-axis covered window keeps the truncation
            // reflection symmetric; every image center is >= L/2 away so a
            // midpoint value per cell is enough
            int mr[3][2] = {{0, 0}, {0, 0}, {0, 0}};
            for (int d = 0; d < n; ++d) {
                mr[d][0] = static_cast<int>(std::ceil((-cover - v0[d]) / L - 1e-12));
                mr[d][1] = static_cast<int>(std::floor((cover - v0[d]) / L + 1e-12));
            }
            const double cellvol = std::pow(h, n);
            int m[3] = {0, 0, 0};
            std::function<void(int)> image_loop = [&](int d) {
                if (d == n) {
                    if (m[0] == 0 && m[1] == 0 && m[2] == 0) return;
                    Vec c = v0;
                    for (int dd = 0; dd < n; ++dd) c[dd] += m[dd] * L;
                    eval_kernel(kind, n, order, c, kv.data());
                    for (int cc = 0; cc < nc; ++cc)
                        dst[cc] += cellvol * kv[static_cast<size_t>(cc)];
                    return;
                }
                for (m[d] = mr[d][0]; m[d] <= mr[d][1]; ++m[d]) image_loop(d + 1);
            };
            image_loop(0);
            tail_of(v0, dst);
        }
    });

    const double parity = odd_kernel ? -1.0 : 1.0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        int oi[3];
        std::size_t mirror = mirror_of(flat, oi);
        if (mirror <= flat) continue;
        const double* src = tbl->w.data() + flat * static_cast<std::size_t>(nc);
        double* mdst = tbl->w.data() + mirror * static_cast<std::size_t>(nc);
        for (int c = 0; c < nc; ++c) mdst[c] = parity * src[c];
        // (v - c) flips with the mirror, so first moments pick up an extra sign
        for (int c = 0; c < nc * n; ++c)
            mom1[mirror * static_cast<std::size_t>(nc * n) + static_cast<std::size_t>(c)] =
                -parity * mom1[flat * static_cast<std::size_t>(nc * n) + static_cast<std::size_t>(c)];
        for (int c = 0; c < nc * nsym; ++c)
            mom2[mirror * static_cast<std::size_t>(nc * nsym) + static_cast<std::size_t>(c)] =
                parity * mom2[flat * static_cast<std::size_t>(nc * nsym) + static_cast<std::size_t>(c)];
        for (int c = 0; c < nc * nsym3; ++c)
            mom3[mirror * static_cast<std::size_t>(nc * nsym3) + static_cast<std::size_t>(c)] =
                -parity * mom3[flat * static_cast<std::size_t>(nc * nsym3) + static_cast<std::size_t>(c)];
    }

    // fold the moment corrections into the table as central-difference
    // stencils acting on the field: the operators stay pure circular
    // convolutions, constants stay exactly annihilated (every stencil has
    // zero coefficient sum), and translation equivariance is untouched
    auto shifted = [&](std::size_t flat, int axis, int step) {
        std::size_t scale = 1;
        for (int d = 0; d < axis; ++d) scale *= static_cast<std::size_t>(N);
        int cur = static_cast<int>(flat / scale) % N;
        int nxt = (cur + step % N + N) % N;
        return flat + (static_cast<std::size_t>(nxt) - static_cast<std::size_t>(cur)) * scale;
    };
    auto add_w = [&](std::size_t flat, int c, double val) {
        tbl->w[flat * static_cast<std::size_t>(nc) + static_cast<std::size_t>(c)] += val;
    };
    // fourth-order central stencils; the first-derivative one also feeds the
    // mixed second and the third derivatives by composition
    const int d1_step[4] = {+2, +1, -1, -2};
    const double d1_coef[4] = {-1.0 / 12, 8.0 / 12, -8.0 / 12, 1.0 / 12};
    // coef * d_k f at offset `flat`
    auto fold_d1 = [&](std::size_t flat, int c, int k, double coef) {
        for (int t = 0; t < 4; ++t)
            add_w(shifted(flat, k, d1_step[t]), c, coef * d1_coef[t] / h);
    };
    // coef * d_k d_l f at offset `flat`
    auto fold_d2 = [&](std::size_t flat, int c, int k, int l, double coef) {
        if (k == l) {
            const int st[5] = {+2, +1, 0, -1, -2};
            const double cf[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
            for (int t = 0; t < 5; ++t)
                add_w(shifted(flat, k, st[t]), c, coef * cf[t] / (h * h));
        } else {
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    add_w(shifted(shifted(flat, k, d1_step[a]), l, d1_step[b]), c,
                          coef * d1_coef[a] * d1_coef[b] / (h * h));
        }
    };
    // coef * d_k d_l d_m f at offset `flat`, composed stencils
    auto fold_d3 = [&](std::size_t flat, int c, int k, int l, int m, double coef) {
        std::size_t pm = shifted(flat, m, +1), mm = shifted(flat, m, -1);
        fold_d2(pm, c, k, l, coef / (2.0 * h));
        fold_d2(mm, c, k, l, -coef / (2.0 * h));
    };
    for (std::size_t flat = 0; flat < total; ++flat) {
        const double* m1 = mom1.data() + flat * static_cast<std::size_t>(nc * n);
        const double* m2 = mom2.data() + flat * static_cast<std::size_t>(nc * nsym);
        const double* m3 = mom3.data() + flat * static_cast<std::size_t>(nc * nsym3);
        for (int c = 0; c < nc; ++c) {
            for (int k = 0; k < n; ++k)
                if (m1[c * n + k] != 0.0) fold_d1(flat, c, k, m1[c * n + k]);
            int p = 0;
            for (int k = 0; k < n; ++k)
                for (int l = k; l < n; ++l, ++p) {
                    double coef = m2[c * nsym + p];
                    if (coef == 0.0) continue;
                    // 1/2 H:M2 with symmetric off-diagonals counted twice
                    fold_d2(flat, c, k, l, k == l ? 0.5 * coef : coef);
                }
            p = 0;
            for (int k = 0; k < n; ++k)
                for (int l = k; l < n; ++l)
                    for (int m = l; m < n; ++m, ++p) {
                        double coef = m3[c * nsym3 + p];
                        if (coef == 0.0) continue;
                        // Taylor 1/3! times the multiplicity of (k,l,m)
                        double mult = (k == l && l == m) ? 1.0 : (k == l || l == m ? 3.0 : 6.0);
                        fold_d3(flat, c, k, l, m, mult * coef / 6.0);
                    }
        }
    }

    // singular cell: Taylor moments of the PV integral, exact cube moments
    {
        const double a_cell = 0.5 * h;
        std::size_t origin = 0;
        {
            std::size_t mult = 1;
            for (int d = 0; d < n; ++d) {
                origin += static_cast<std::size_t>(N / 2) * mult;
                mult *= static_cast<std::size_t>(N);
            }
        }
        if (kind == KernelKind::grad) {
            const double R1 = cube_radial(n, a_cell, 1.0 - order) / n;
            // third-order cell moments of v_j |v|^{-n-order-1}
            const double B4 = cube_A4(n, a_cell, order - 1.0);
            const double B22 = n >= 2 ? cube_A22(n, a_cell, order - 1.0) : 0.0;
            for (int j = 0; j < n; ++j) {
                fold_d1(origin, j, j, R1);
                fold_d3(origin, j, j, j, j, B4 / 6.0);
                for (int d = 0; d < n; ++d)
                    if (d != j) fold_d3(origin, j, j, d, d, 0.5 * B22);
            }
        } else if (kind == KernelKind::lap) {
            const double R2 = cube_radial(n, a_cell, 2.0 - order);
            for (int k = 0; k < n; ++k) fold_d2(origin, 0, k, k, R2 / (2.0 * n));
        } else {
            const double s = order;
            const double R2 = cube_radial(n, a_cell, 2.0 - s);
            const double A4 = cube_A4(n, a_cell, s);
            const double A22 = n >= 2 ? cube_A22(n, a_cell, s) : 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    int c = i * n + j;
                    if (i != j) {
                        fold_d2(origin, c, std::min(i, j), std::max(i, j), (n + s) * A22);
                    } else {
                        for (int k = 0; k < n; ++k) {
                            double coef = (k == i)
                                              ? 0.5 * (n + s) * A4 - R2 / (2.0 * n)
                                              : 0.5 * (n + s) * A22 - R2 / (2.0 * n);
                            fold_d2(origin, c, k, k, coef);
                        }
                    }
                }
        }
    }

    tbl->colsum.assign(static_cast<size_t>(nc), 0.0);
    for (std::size_t flat = 0; flat < total; ++flat)
        for (int c = 0; c < nc; ++c) tbl->colsum[static_cast<size_t>(c)] += tbl->at(flat, c);

    std::lock_guard<std::mutex> lock(mu);
    auto [pos, ok] = cache.emplace(key.str(), tbl);
    (void)ok;
    return pos->second;
}

void validate_field(const GridField& f, double order, double max_order) {
    if (f.n < 1 || f.n > 3 || f.N < 4 || f.N % 2 != 0)
        throw ConfigError("lattice fractional operators need 1 <= n <= 3 and even N >= 4");
    if (!(order > 0.0 && order < max_order)) throw DomainError("fractional order out of range");
    if (f.decay.cls == DecayClass::algebraic && f.decay.exponent <= f.n + 2)
        throw UnsupportedDecay("algebraic decay needs exponent > n + 2");
}

// Circular convolution of one field component against one kernel component,
// returning sum_o f(x (+) o) T[o] per node. `wrap` has length 2N.
void circular_conv(const GridField& f, int fc, const KernelTable& T, int tc,
                   std::vector<double>& out) {
    const int n = f.n, N = f.N;
    const std::size_t total = f.nodes();
    out.assign(total, 0.0);
    std::vector<int> wrap(static_cast<size_t>(2 * N));
    for (int t = 0; t < 2 * N; ++t) wrap[static_cast<size_t>(t)] = (t + N / 2) % N;

    const int chunks = std::min<int>(64, static_cast<int>(total));
    parallel_for(chunks, [&](int chunk) {
        for (std::size_t x = static_cast<std::size_t>(chunk); x < total;
             x += static_cast<std::size_t>(chunks)) {
            int xi[3] = {0, 0, 0};
            std::size_t r = x;
            for (int d = 0; d < n; ++d) {
                xi[d] = static_cast<int>(r % static_cast<std::size_t>(N));
                r /= static_cast<std::size_t>(N);
            }
            double acc = 0.0;
            if (n == 1) {
                for (int o0 = 0; o0 < N; ++o0)
                    acc += f.at(static_cast<std::size_t>(wrap[static_cast<size_t>(xi[0] + o0)]), fc) *
                           T.at(static_cast<std::size_t>(o0), tc);
            } else if (n == 2) {
                for (int o1 = 0; o1 < N; ++o1) {
                    std::size_t yrow = static_cast<std::size_t>(wrap[static_cast<size_t>(xi[1] + o1)]) *
                                       static_cast<std::size_t>(N);
                    std::size_t trow = static_cast<std::size_t>(o1) * static_cast<std::size_t>(N);
                    for (int o0 = 0; o0 < N; ++o0)
                        acc += f.at(yrow + static_cast<std::size_t>(wrap[static_cast<size_t>(xi[0] + o0)]), fc) *
                               T.at(trow + static_cast<std::size_t>(o0), tc);
                }
            } else {
                for (int o2 = 0; o2 < N; ++o2) {
                    std::size_t yp = static_cast<std::size_t>(wrap[static_cast<size_t>(xi[2] + o2)]) *
                                     static_cast<std::size_t>(N) * static_cast<std::size_t>(N);
                    std::size_t tp = static_cast<std::size_t>(o2) * static_cast<std::size_t>(N) *
                                     static_cast<std::size_t>(N);
                    for (int o1 = 0; o1 < N; ++o1) {
                        std::size_t yrow = yp + static_cast<std::size_t>(wrap[static_cast<size_t>(xi[1] + o1)]) *
                                                    static_cast<std::size_t>(N);
                        std::size_t trow = tp + static_cast<std::size_t>(o1) * static_cast<std::size_t>(N);
                        for (int o0 = 0; o0 < N; ++o0)
                            acc += f.at(yrow + static_cast<std::size_t>(wrap[static_cast<size_t>(xi[0] + o0)]), fc) *
                                   T.at(trow + static_cast<std::size_t>(o0), tc);
                    }
                }
            }
            out[x] = acc;
        }
    });
}

GridField like(const GridField& f, int ncomp) {
    GridField g;
    g.n = f.n;
    g.N = f.N;
    g.L = f.L;
    g.ncomp = ncomp;
    g.decay = f.decay;
    g.data.assign(f.nodes() * static_cast<std::size_t>(ncomp), 0.0);
    return g;
}

} // namespace

Eigen::MatrixXd frac_kernel_tensor(const Vec& v, double alpha, double beta) {
    const int n = v.n;
    const double s = alpha + beta;
    const double r2 = v.squared_norm();
    if (r2 == 0.0) throw DomainError("frac_kernel_tensor: v must be nonzero");
    const double c = -specfun::nu_alpha(s, n) / s * std::pow(r2, -0.5 * (n + s));
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = c * ((n + s) * v[i] * v[j] / r2 - (i == j ? 1.0 : 0.0));
    return m;
}

GridField frac_gradient(const GridField& f, double alpha) {
    validate_field(f, alpha, 1.0);
    if (f.ncomp != 1) throw ConfigError("frac_gradient expects a scalar field");
    auto T = build_table(KernelKind::grad, f.n, f.N, f.L, alpha);
    const double mu = specfun::mu_alpha(alpha, f.n);
    GridField out = like(f, f.n);
    std::vector<double> conv;
    for (int j = 0; j < f.n; ++j) {
        circular_conv(f, 0, *T, j, conv);
        const std::size_t total = f.nodes();
        for (std::size_t x = 0; x < total; ++x) out.at(x, j) = mu * conv[x];
    }
    return out;
}

GridField frac_divergence(const GridField& w, double alpha) {
    validate_field(w, alpha, 1.0);
    if (w.ncomp != w.n) throw ConfigError("frac_divergence expects a vector field");
    auto T = build_table(KernelKind::grad, w.n, w.N, w.L, alpha);
    const double mu = specfun::mu_alpha(alpha, w.n);
    GridField out = like(w, 1);
    std::vector<double> conv;
    for (int j = 0; j < w.n; ++j) {
        circular_conv(w, j, *T, j, conv);
        const std::size_t total = w.nodes();
        for (std::size_t x = 0; x < total; ++x) out.at(x, 0) += mu * conv[x];
    }
    return out;
}

GridField frac_laplacian(const GridField& f, double alpha) {
    validate_field(f, alpha, 2.0);
    if (f.ncomp != 1) throw ConfigError("frac_laplacian expects a scalar field");
    auto T = build_table(KernelKind::lap, f.n, f.N, f.L, alpha);
    const double nu = specfun::nu_alpha(alpha, f.n);
    GridField out = like(f, 1);
    std::vector<double> conv;
    circular_conv(f, 0, *T, 0, conv);
    const std::size_t total = f.nodes();
    for (std::size_t x = 0; x < total; ++x)
        out.at(x, 0) = nu * (conv[x] - f.at(x, 0) * T->colsum[0]);
    return out;
}

GridField frac_hessian_direct(const GridField& f, double alpha, double beta) {
    const double s = alpha + beta;
    validate_field(f, s, 2.0);
    if (!(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0))
        throw DomainError("frac_hessian_direct: alpha, beta in (0,1)");
    if (f.ncomp != 1) throw ConfigError("frac_hessian_direct expects a scalar field");
    auto T = build_table(KernelKind::hess, f.n, f.N, f.L, s);
    const int n = f.n;
    const double c = -specfun::nu_alpha(s, n) / s;
    GridField out = like(f, n * n);
    std::vector<double> conv;
    const std::size_t total = f.nodes();
    for (int cidx = 0; cidx < n * n; ++cidx) {
        circular_conv(f, 0, *T, cidx, conv);
        for (std::size_t x = 0; x < total; ++x)
            out.at(x, cidx) =
                c * (conv[x] - f.at(x, 0) * T->colsum[static_cast<size_t>(cidx)]);
    }
    return out;
}

// ------------------------------------------------- kernel identity (Lemma)

namespace {

using Mat2 = Eigen::Matrix2d;

Mat2 lemma_integrand(const Vec& u, const Vec& v, double alpha, double beta) {
    Vec d = v - u;
    double cu = std::pow(u.squared_norm(), -0.5 * (2 + alpha + 1));
    double cd = std::pow(d.squared_norm(), -0.5 * (2 + beta + 1));
    Mat2 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = d[i] * u[j] * cu * cd;
    return m;
}

} // namespace

KernelCheckResult hessian_kernel_identity_check(const Vec& v, double alpha, double beta,
                                                int resolution) {
    if (v.n != 2) throw DomainError("hessian_kernel_identity_check is n = 2 only");
    if (v.squared_norm() == 0.0) throw DomainError("v must be nonzero");
    if (resolution < 1) resolution = 1;
    const int n = 2;
    const double R = v.norm();
    const double delta = 1e-3 * R;
    const double theta_v = std::atan2(v[1], v[0]);
    Mat2 lhs = Mat2::Zero();

    const int n_theta = 256 * resolution;
    const auto& g_rad = gl_rule(96 * resolution);
    const auto& g_seg = gl_rule(64 * resolution);

    // polar patches around the two singularities; log-radius resolves the
    // r^{-1-order} profile
    auto polar_patch = [&](const Vec& center) {
        const double tau_max = std::log((0.5 * R) / delta);
        for (int it = 0; it < n_theta; ++it) {
            double th = 2.0 * kPi * (it + 0.5) / n_theta;
            Vec e(std::cos(th), std::sin(th));
            for (const auto& nd : g_rad) {
                double tau = 0.5 * (nd.x + 1.0) * tau_max;
                double r = delta * std::exp(tau);
                Vec u = center + e * r;
                // dA = r dr dth = r^2 dtau dth
                lhs += lemma_integrand(u, v, alpha, beta) *
                       (nd.w * 0.5 * tau_max * (2.0 * kPi / n_theta) * r * r);
            }
        }
    };
    polar_patch(Vec(0.0, 0.0));
    polar_patch(v);

    // complement of the two touching disks, polar about the midpoint;
    // the union boundary seen from there is rho(th) = R |cos(th - th_v)|
    const Vec m(0.5 * v[0], 0.5 * v[1]);
    for (int seg = 0; seg < 4; ++seg) {
        double th0 = theta_v + seg * 0.5 * kPi - 0.25 * kPi;
        for (const auto& ns : g_seg) {
            double th = th0 + 0.25 * kPi * (ns.x + 1.0);
            Vec e(std::cos(th), std::sin(th));
            double rho = R * std::abs(std::cos(th - theta_v));
            double w_th = ns.w * 0.25 * kPi;
            for (const auto& nr : g_rad) { // rho .. 4R
                double r = rho + 0.5 * (nr.x + 1.0) * (4.0 * R - rho);
                lhs += lemma_integrand(m + e * r, v, alpha, beta) *
                       (nr.w * 0.5 * (4.0 * R - rho) * w_th * r);
            }
            for (const auto& nr : g_seg) { // 4R .. infinity via r = 4R/t
                double t = 0.5 * (nr.x + 1.0);
                if (t <= 0.0) continue;
                double r = 4.0 * R / t;
                lhs += lemma_integrand(m + e * r, v, alpha, beta) *
                       (nr.w * 0.5 * w_th * (4.0 * R) * r / (t * t));
            }
        }
    }

    // analytic leading-order corrections for the excluded balls
    const double om = specfun::unit_sphere_measure(n - 1);
    Mat2 vvt;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) vvt(i, j) = v[i] * v[j] / v.squared_norm();
    double m2_0 = om / n * std::pow(delta, 1.0 - alpha) / (1.0 - alpha);
    double m2_v = om / n * std::pow(delta, 1.0 - beta) / (1.0 - beta);
    lhs += m2_0 * std::pow(R, -(n + beta + 1.0)) *
           ((n + beta + 1.0) * vvt - Mat2::Identity());
    lhs += m2_v * std::pow(R, -(n + alpha + 1.0)) *
           ((n + alpha + 1.0) * vvt - Mat2::Identity());

    KernelCheckResult res;
    res.lhs = lhs;
    res.rhs = frac_kernel_tensor(v, alpha, beta) /
              (specfun::mu_alpha(alpha, n) * specfun::mu_alpha(beta, n));
    res.rel_err = (res.lhs - res.rhs).norm() / res.rhs.norm();
    return res;
}

// -------------------------------------------------- Gauss-Weierstrass checks

double gauss_weierstrass(double t, const Vec& u) {
    return std::pow(4.0 * kPi * t, -0.5 * u.n) * std::exp(-u.squared_norm() / (4.0 * t));
}

PairCheck gw_convolution_check(const std::array<int, 3>& gamma, double s, double t,
                               const Vec& v, int grid_n) {
    const int n = v.n;
    int order = 0;
    for (int d = 0; d < n; ++d) order += gamma[static_cast<size_t>(d)];
    if (order > 2) throw DomainError("gw_convolution_check: |gamma| <= 2");

    // product Gaussian: mean t v/(s+t), per-axis variance 2st/(s+t)
    const double sd = std::sqrt(2.0 * s * t / (s + t));
    Vec c0 = v * (t / (s + t));
    const double w = 10.0 * sd;
    const double h = 2.0 * w / grid_n;
    double numeric = 0.0;
    int idx[3] = {0, 0, 0};
    std::function<void(int, Vec)> loop = [&](int d, Vec u) {
        if (d == n) {
            double val = gauss_weierstrass(s, v - u) * gauss_weierstrass(t, u);
            for (int dd = 0; dd < n; ++dd)
                for (int k = 0; k < gamma[static_cast<size_t>(dd)]; ++k) val *= u[dd];
            numeric += val;
            return;
        }
        for (idx[d] = 0; idx[d] < grid_n; ++idx[d]) {
            u[d] = c0[d] - w + (idx[d] + 0.5) * h;
            loop(d + 1, u);
        }
    };
    loop(0, Vec::zero(n));
    numeric *= std::pow(h, n);

    double closed = gauss_weierstrass(s + t, v);
    for (int dd = 0; dd < n; ++dd)
        for (int k = 0; k < gamma[static_cast<size_t>(dd)]; ++k)
            closed *= t * v[dd] / (s + t);
    for (int dd = 0; dd < n; ++dd)
        if (gamma[static_cast<size_t>(dd)] == 2)
            closed += 2.0 * s * t / (s + t) * gauss_weierstrass(s + t, v);
    return {numeric, closed};
}

double gw_prefactor(int n, double alpha) {
    return std::pow(kPi, 0.5 * n) /
           (std::pow(2.0, alpha + 1.0) * specfun::gamma(0.5 * (n + alpha + 1.0)));
}

PairCheck gw_subordination_check(double alpha, const Vec& u) {
    const int n = u.n;
    const double r2 = u.squared_norm();
    if (r2 == 0.0) throw DomainError("gw_subordination_check: u must be nonzero");
    // substitute t = |u|^2/(4 tau), then tau = e^y: the integrand becomes
    // (const) tau^{(n+alpha+1)/2} e^{-tau}, smooth with exponential falloff
    // at both ends of the y axis
    auto integrand = [&](double tau) {
        double g = std::pow(kPi * r2 / tau, -0.5 * n) * std::exp(-tau);
        double tpow = std::pow(r2 / (4.0 * tau), -0.5 * (alpha + 3.0));
        double jac = r2 / (4.0 * tau * tau);
        return g * tpow * jac;
    };
    const auto& g = gl_rule(48);
    double I = 0.0;
    const double y0 = -60.0, y1 = 8.0;
    const int nseg = 10;
    for (int seg = 0; seg < nseg; ++seg) {
        double a = y0 + (y1 - y0) * seg / nseg, b = y0 + (y1 - y0) * (seg + 1) / nseg;
        for (const auto& nd : g) {
            double y = a + 0.5 * (nd.x + 1.0) * (b - a);
            double tau = std::exp(y);
            I += nd.w * 0.5 * (b - a) * tau * integrand(tau);
        }
    }
    return {gw_prefactor(n, alpha) * I, std::pow(r2, -0.5 * (n + alpha + 1.0))};
}

GridField ball_indicator_field(int n, int N, double L, double radius) {
    const double h = L / N;
    return GridField::sample(n, N, L, 1, {DecayClass::compact, 0.0},
                             [&](const Vec& x, double* out) {
                                 double d = (x.norm() - radius) / h;
                                 out[0] = std::clamp(-2.0 * d, -1.0, 1.0);
                             });
}

} // namespace nlcurv::fracops

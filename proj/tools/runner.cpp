#include "runner.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "nlcurv/curvature.hpp"
#include "nlcurv/errors.hpp"

namespace nlcurv::cli {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string utc_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct TaskResult {
    bool ok = false;
    std::string error;
    CurvatureReport rep;
    Eigen::MatrixXd L; // requested representation
};

// Guarded extrapolation for limit rows: entries whose tableau does not settle
// (typically exact zeros) come out as nan rather than aborting the row.
double limit_or_nan(const std::vector<std::pair<double, double>>& series) {
    try {
        return sigma_to_one_limit(series).value;
    } catch (const Error&) {
        return kNan;
    }
}

} // namespace

int run_curvature(const RunConfig& cfg, std::ostream& errlog) {
    validate_config(cfg);
    auto scene = make_scene(cfg.scene);
    auto points = resolve_points(*scene, cfg);
    const int n = scene->dim();
    const int d = n - 1;
    const auto rep_kind = cfg.representation == "fullspace" ? TensorRepresentation::fullspace
                          : cfg.representation == "surface" ? TensorRepresentation::surface
                                                            : TensorRepresentation::angular;

    const std::size_t n_sigma = cfg.sigmas.size();
    std::vector<TaskResult> results(points.size() * n_sigma);
    // The quadrature layer already fans out over angular nodes and directions,
    // so the task loop stays serial; results land in task order either way.
    for (std::size_t t = 0; t < results.size(); ++t) {
        const Vec& z = points[t / n_sigma];
        const double sigma = cfg.sigmas[t % n_sigma];
        auto& r = results[t];
        try {
            r.rep = curvature_report(*scene, z, sigma, cfg.quad);
            r.L = rep_kind == TensorRepresentation::angular
                      ? r.rep.L.m
                      : curvature_tensor(*scene, z, sigma, cfg.quad, rep_kind).m;
            r.ok = true;
        } catch (const Error& e) {
            r.error = e.what();
            errlog << "point " << z << " sigma " << sigma << ": " << e.what() << "\n";
        }
    }

    std::ostringstream csv;
    if (!cfg.reproducible) csv << "# generated " << utc_now() << "\n";
    csv << "scene,n,point_x,point_y,point_z,sigma,direction_index,k_sigma_e,H_vol,H_avg";
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) csv << ",L" << a << b;
    csv << ",K_sigma,tail_bound,cancel_residual,kind\n";

    auto row_prefix = [&](const Vec& z, double sigma, int dir) {
        csv << cfg.scene << "," << n << "," << num(z[0]) << "," << num(z.n > 1 ? z[1] : 0.0)
            << "," << num(z.n > 2 ? z[2] : 0.0) << "," << num(sigma) << "," << dir;
    };
    auto row_values = [&](double k, double hv, double ha, const Eigen::MatrixXd* L, double K,
                          double tail, double cancel, const char* kind) {
        csv << "," << num(k) << "," << num(hv) << "," << num(ha);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) csv << "," << num(L ? (*L)(a, b) : kNan);
        csv << "," << num(K) << "," << num(tail) << "," << num(cancel) << "," << kind << "\n";
    };

    for (std::size_t t = 0; t < results.size(); ++t) {
        const Vec& z = points[t / n_sigma];
        const double sigma = cfg.sigmas[t % n_sigma];
        const auto& r = results[t];
        if (!r.ok) {
            row_prefix(z, sigma, -1);
            row_values(kNan, kNan, kNan, nullptr, kNan, kNan, kNan, "error");
            continue;
        }
        for (std::size_t i = 0; i < r.rep.samples.k.size(); ++i) {
            row_prefix(z, sigma, static_cast<int>(i));
            row_values(r.rep.samples.k[i], r.rep.H_volume, r.rep.H_avg, &r.L, r.rep.K,
                       r.rep.diag.tail_bound, r.rep.diag.cancel_residual, "sample");
        }
    }

    if (cfg.extrapolate) {
        for (std::size_t p = 0; p < points.size(); ++p) {
            bool all_ok = true;
            for (std::size_t s = 0; s < n_sigma; ++s) all_ok &= results[p * n_sigma + s].ok;
            if (!all_ok) continue;
            std::vector<std::pair<double, double>> ks, hv, ha;
            Eigen::MatrixXd L(d, d);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) {
                    std::vector<std::pair<double, double>> le;
                    for (std::size_t s = 0; s < n_sigma; ++s)
                        le.emplace_back(cfg.sigmas[s],
                                        results[p * n_sigma + s].L(a, b));
                    L(a, b) = limit_or_nan(le);
                }
            for (std::size_t s = 0; s < n_sigma; ++s) {
                const auto& r = results[p * n_sigma + s];
                ks.emplace_back(cfg.sigmas[s], r.rep.samples.k[0]);
                hv.emplace_back(cfg.sigmas[s], r.rep.H_volume);
                ha.emplace_back(cfg.sigmas[s], r.rep.H_avg);
            }
            row_prefix(points[p], 1.0, -1);
            row_values(limit_or_nan(ks), limit_or_nan(hv), limit_or_nan(ha), &L, kNan, kNan,
                       kNan, "limit");
        }
    }

    if (cfg.output_csv.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(cfg.output_csv);
        if (!out) throw ConfigError("cannot write csv to " + cfg.output_csv);
        out << csv.str();
    }

    if (!cfg.output_json.empty()) {
        nlohmann::json tasks = nlohmann::json::array();
        for (std::size_t t = 0; t < results.size(); ++t) {
            const auto& r = results[t];
            nlohmann::json jt{{"point_index", t / n_sigma},
                              {"sigma", cfg.sigmas[t % n_sigma]},
                              {"ok", r.ok}};
            if (r.ok) {
                jt["H_vol"] = r.rep.H_volume;
                jt["H_avg"] = r.rep.H_avg;
                jt["K"] = r.rep.K;
                jt["trace_residual"] = r.rep.trace_residual;
                jt["tail_bound"] = r.rep.diag.tail_bound;
                jt["cancel_residual"] = r.rep.diag.cancel_residual;
            } else {
                jt["error"] = r.error;
            }
            tasks.push_back(std::move(jt));
        }
        nlohmann::json j{{"config", config_to_json(cfg)}, {"tasks", tasks}};
        std::ofstream out(cfg.output_json);
        if (!out) throw ConfigError("cannot write json to " + cfg.output_json);
        out << j.dump(2) << "\n";
    }

    for (const auto& r : results)
        if (!r.ok) return 1;
    return 0;
}

} // namespace nlcurv::cli

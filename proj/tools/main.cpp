#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "runner.hpp"
#include "verify.hpp"

#include "nlcurv/curvature.hpp"
#include "nlcurv/errors.hpp"
#include "nlcurv/fracops.hpp"
#include "nlcurv/gridfield.hpp"
#include "nlcurv/oracle.hpp"
#include "nlcurv/quadrature.hpp"

namespace {

using namespace nlcurv;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Vec parse_point(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("bad point coordinate '" + item + "' in '" + s + "'");
        }
    }
    if (v.size() == 2) return Vec(v[0], v[1]);
    if (v.size() == 3) return Vec(v[0], v[1], v[2]);
    throw ConfigError("point '" + s + "': expected 2 or 3 comma-separated coordinates");
}

int do_verify(const std::vector<std::string>& suites, const std::string& json_path) {
    nlohmann::json verdict = nlohmann::json::array();
    bool all_ok = true;
    for (const auto& suite : suites) {
        auto results = verify::run_suite(suite);
        for (const auto& r : results) {
            all_ok &= r.passed;
            std::printf("[%s] %-55s %.3e (tol %.0e)%s%s\n", r.passed ? "PASS" : "FAIL",
                        (suite + ": " + r.name).c_str(), r.value, r.target,
                        r.detail.empty() ? "" : ("  " + r.detail).c_str(),
                        r.seconds > 0.05 ? (" [" + std::to_string(r.seconds) + "s]").c_str()
                                         : "");
            verdict.push_back({{"suite", suite},
                               {"criterion", r.criterion},
                               {"name", r.name},
                               {"passed", r.passed},
                               {"value", r.value},
                               {"target", r.target},
                               {"detail", r.detail},
                               {"seconds", r.seconds}});
        }
    }
    nlohmann::json out{{"passed", all_ok}, {"checks", verdict}};
    if (!json_path.empty()) {
        if (json_path == "-") {
            std::cout << out.dump(2) << "\n";
        } else {
            std::ofstream f(json_path);
            if (!f) throw ConfigError("cannot write " + json_path);
            f << out.dump(2) << "\n";
        }
    }
    return all_ok ? 0 : 1;
}

int do_perimeter(int n, double radius, double window, double sigma, long long samples,
                 uint64_t seed, double lambda, const std::string& json_path) {
    QuadratureSpec spec;
    spec.mc_samples = samples;
    spec.rng_seed = seed;
    auto ball = [n](double r) {
        return [r](const Vec& x) { return x.norm() < r; };
    };
    Vec c = Vec::zero(n);
    Vec lo = Vec::zero(n), hi = Vec::zero(n);
    for (int i = 0; i < n; ++i) lo[i] = -window, hi[i] = window;
    SphereScene sphere(c, radius);
    auto area = sigma_area(sphere, ball(window), sigma, Box{lo, hi}, spec);
    auto per = sigma_perimeter(ball(radius), ball(window), sigma, Box{lo, hi}, spec);
    double se = std::hypot(area.std_error, per.std_error);
    nlohmann::json out{
        {"n", n},
        {"radius", radius},
        {"window", window},
        {"sigma", sigma},
        {"sigma_area", {{"estimate", area.estimate}, {"std_error", area.std_error}}},
        {"sigma_perimeter", {{"estimate", per.estimate}, {"std_error", per.std_error}}},
        {"difference_in_se", std::abs(area.estimate - per.estimate) / se}};
    std::printf("sigma-area      %s +- %s\n", num(area.estimate).c_str(),
                num(area.std_error).c_str());
    std::printf("sigma-perimeter %s +- %s\n", num(per.estimate).c_str(),
                num(per.std_error).c_str());
    std::printf("difference      %.2f combined SE\n",
                std::abs(area.estimate - per.estimate) / se);
    if (lambda > 0.0) {
        Vec lo2 = lo * lambda, hi2 = hi * lambda;
        auto per2 = sigma_perimeter(ball(radius * lambda), ball(window * lambda), sigma,
                                    Box{lo2, hi2}, spec);
        double want = std::pow(lambda, n - sigma) * per.estimate;
        double se2 = std::hypot(per2.std_error,
                                std::pow(lambda, n - sigma) * per.std_error);
        out["scaling"] = {{"lambda", lambda},
                          {"estimate", per2.estimate},
                          {"expected", want},
                          {"difference_in_se", std::abs(per2.estimate - want) / se2}};
        std::printf("scaling lambda=%g: %s vs expected %s (%.2f combined SE)\n", lambda,
                    num(per2.estimate).c_str(), num(want).c_str(),
                    std::abs(per2.estimate - want) / se2);
    }
    if (!json_path.empty()) {
        std::ofstream f(json_path);
        if (!f) throw ConfigError("cannot write " + json_path);
        f << out.dump(2) << "\n";
    }
    return 0;
}

int do_fracops(const std::string& op, double alpha, double beta, int n, int grid, double box,
               const std::string& field_stem, const std::string& out_stem,
               bool compare_spectral) {
    GridField f;
    if (!field_stem.empty()) {
        f = GridField::load(field_stem);
    } else if (op == "div") {
        f = GridField::sample(n, grid, box, n, {DecayClass::gaussian, 0.0},
                              [n](const Vec& x, double* o) {
                                  double g = std::exp(-0.5 * x.squared_norm());
                                  for (int i = 0; i < n; ++i)
                                      o[i] = (i % 2 ? -1.0 : 1.0) * x[i] * g;
                              });
    } else {
        f = GridField::sample(n, grid, box, 1, {DecayClass::gaussian, 0.0},
                              [](const Vec& x, double* o) {
                                  o[0] = std::exp(-0.5 * x.squared_norm());
                              });
    }

    GridField g;
    if (op == "lap") g = fracops::frac_laplacian(f, alpha);
    else if (op == "grad") g = fracops::frac_gradient(f, alpha);
    else if (op == "div") g = fracops::frac_divergence(f, alpha);
    else if (op == "hess") g = fracops::frac_hessian_direct(f, alpha, beta);
    else throw ConfigError("fracops op must be lap, grad, div or hess");

    nlohmann::json out{{"op", op},       {"alpha", alpha}, {"n", f.n},
                       {"grid", f.N},    {"box", f.L},     {"max_abs", g.max_abs()}};
    if (op == "hess") out["beta"] = beta;
    if (compare_spectral && op != "hess") {
        auto symbol = op == "lap"    ? oracle::SpectralSymbol::laplacian
                      : op == "grad" ? oracle::SpectralSymbol::gradient
                                     : oracle::SpectralSymbol::divergence;
        auto ref = oracle::spectral_frac_op(f, symbol, alpha);
        out["l2_vs_spectral"] = l2_relative_error(g, ref);
    }
    if (!out_stem.empty()) {
        g.save(out_stem);
        g.export_csv_slice(out_stem + ".csv");
        out["saved"] = out_stem;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int do_sphere_table(int n, const std::vector<double>& rhos, const std::vector<double>& sigmas,
                    bool numeric, const std::string& out_path) {
    std::ostringstream csv;
    csv << "n,rho,sigma,k_closed";
    if (numeric) csv << ",k_numeric,rel_err";
    csv << "\n";
    QuadratureSpec spec;
    for (double rho : rhos)
        for (double sigma : sigmas) {
            double k = oracle::sphere_k(n, rho, sigma);
            csv << n << "," << num(rho) << "," << num(sigma) << "," << num(k);
            if (numeric) {
                SphereScene scene(Vec::zero(n), rho);
                Vec z = Vec::axis(n, 0) * rho;
                auto frame = tangent_frame(scene, z);
                double kq = directional_curvature(scene, z, frame.tangent[0], sigma, spec);
                csv << "," << num(kq) << "," << num(std::abs(kq - k) / std::abs(k));
            }
            csv << "\n";
        }
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream f(out_path);
        if (!f) throw ConfigError("cannot write " + out_path);
        f << csv.str();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlocal curvature and fractional operator toolkit"};
    app.require_subcommand(1);

    // curvature
    auto* curv = app.add_subcommand("curvature", "directional/mean/tensor curvature runs");
    std::string cfg_path, scene, rep, out_csv, out_json;
    std::vector<std::string> point_strs;
    std::vector<double> sigmas, sweep;
    int grid_pts = 0;
    bool extrapolate = false, reproducible = false;
    int n_phi = 0, n_dir = 0;
    double eps_cutoff = 0.0, r_max = 0.0;
    uint64_t seed = 0;
    curv->add_option("--config", cfg_path, "JSON run config; flags override it");
    curv->add_option("--scene", scene, "scene spec, e.g. sphere:r=0.5 or torus:R=2,r=0.7");
    curv->add_option("--point", point_strs, "evaluation point x,y[,z] (repeatable)");
    curv->add_option("--grid-on-surface", grid_pts, "sample this many surface points");
    curv->add_option("--sigma", sigmas, "fractional orders in (0,1)")->delimiter(',');
    curv->add_option("--sweep-sigma", sweep, "sigma sweep (same as --sigma)")->delimiter(',');
    curv->add_flag("--extrapolate", extrapolate, "append sigma->1 limit rows");
    curv->add_option("--rep", rep, "tensor representation: angular|fullspace|surface");
    curv->add_option("--n-phi", n_phi, "angular nodes per half-plane");
    curv->add_option("--n-dir", n_dir, "directions on the tangent sphere");
    curv->add_option("--eps-cutoff", eps_cutoff, "brute-force cutoff");
    curv->add_option("--r-max", r_max, "radial truncation");
    curv->add_option("--seed", seed, "rng seed");
    curv->add_option("--out", out_csv, "CSV output path (default stdout)");
    curv->add_option("--json", out_json, "JSON report path");
    curv->add_flag("--reproducible", reproducible, "suppress the timestamp header");

    // perimeter
    auto* per = app.add_subcommand("perimeter", "monte carlo sigma-perimeter / sigma-area");
    int per_n = 3;
    double per_r = 1.0, per_w = 2.0, per_sigma = 0.5, per_lambda = 0.0;
    long long per_samples = 1'000'000;
    uint64_t per_seed = 0x9e3779b9;
    std::string per_json;
    per->add_option("--n", per_n, "ambient dimension")->check(CLI::Range(2, 3));
    per->add_option("--radius", per_r, "ball radius");
    per->add_option("--window", per_w, "window ball radius");
    per->add_option("--sigma", per_sigma, "fractional order");
    per->add_option("--samples", per_samples, "monte carlo samples");
    per->add_option("--seed", per_seed, "rng seed");
    per->add_option("--lambda", per_lambda, "also check the scaling law at this factor");
    per->add_option("--json", per_json, "JSON report path");

    // fracops
    auto* fro = app.add_subcommand("fracops", "lattice fractional operators on grid fields");
    std::string fro_op = "lap", fro_field, fro_out;
    double fro_alpha = 0.5, fro_beta = 0.3, fro_box = 16.0;
    int fro_n = 2, fro_grid = 64;
    bool fro_spectral = false;
    fro->add_option("--op", fro_op, "lap|grad|div|hess");
    fro->add_option("--alpha", fro_alpha, "order alpha");
    fro->add_option("--beta", fro_beta, "order beta (hess only)");
    fro->add_option("--n", fro_n, "dimension")->check(CLI::Range(1, 3));
    fro->add_option("--grid", fro_grid, "nodes per axis");
    fro->add_option("--box", fro_box, "box side length");
    fro->add_option("--field", fro_field, "load field from this stem (default: gaussian)");
    fro->add_option("--out", fro_out, "save the result under this stem");
    fro->add_flag("--compare-spectral", fro_spectral, "report L2 error vs the spectral oracle");

    // verify
    auto* ver = app.add_subcommand("verify", "run verification suites");
    std::vector<std::string> ver_suites;
    std::string ver_json;
    ver->add_option("--suite", ver_suites,
                    "specfun|sphere|identities|fracops|perimeter (default: all)");
    ver->add_option("--json", ver_json, "JSON verdict path ('-' for stdout)");

    // sphere-table
    auto* tab = app.add_subcommand("sphere-table", "closed-form sphere curvature table");
    int tab_n = 3;
    std::vector<double> tab_rho{0.5, 1.0, 2.0}, tab_sigma{0.25, 0.5, 0.75};
    bool tab_numeric = false;
    std::string tab_out;
    tab->add_option("--n", tab_n, "ambient dimension")->check(CLI::Range(2, 3));
    tab->add_option("--rho", tab_rho, "sphere radii")->delimiter(',');
    tab->add_option("--sigma", tab_sigma, "fractional orders")->delimiter(',');
    tab->add_flag("--numeric", tab_numeric, "add quadrature values and errors");
    tab->add_option("--out", tab_out, "CSV output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*curv) {
            nlcurv::cli::RunConfig cfg;
            if (curv->count("--config")) cfg = nlcurv::cli::load_config(cfg_path);
            if (curv->count("--scene")) cfg.scene = scene;
            if (curv->count("--point")) {
                cfg.points.clear();
                for (const auto& s : point_strs) cfg.points.push_back(parse_point(s));
            }
            if (curv->count("--grid-on-surface")) cfg.grid_on_surface = grid_pts;
            if (curv->count("--sigma")) cfg.sigmas = sigmas;
            if (curv->count("--sweep-sigma")) cfg.sigmas = sweep;
            if (curv->count("--extrapolate")) cfg.extrapolate = extrapolate;
            if (curv->count("--rep")) cfg.representation = rep;
            if (curv->count("--n-phi")) cfg.quad.n_phi = n_phi;
            if (curv->count("--n-dir")) cfg.quad.n_dir = n_dir;
            if (curv->count("--eps-cutoff")) cfg.quad.eps_cutoff = eps_cutoff;
            if (curv->count("--r-max")) cfg.quad.r_max = r_max;
            if (curv->count("--seed")) cfg.quad.rng_seed = seed;
            if (curv->count("--out")) cfg.output_csv = out_csv;
            if (curv->count("--json")) cfg.output_json = out_json;
            if (curv->count("--reproducible")) cfg.reproducible = reproducible;
            return nlcurv::cli::run_curvature(cfg, std::cerr);
        }
        if (*per)
            return do_perimeter(per_n, per_r, per_w, per_sigma, per_samples, per_seed,
                                per_lambda, per_json);
        if (*fro)
            return do_fracops(fro_op, fro_alpha, fro_beta, fro_n, fro_grid, fro_box, fro_field,
                              fro_out, fro_spectral);
        if (*ver) {
            if (ver_suites.empty()) ver_suites = nlcurv::verify::suite_names();
            return do_verify(ver_suites, ver_json);
        }
        if (*tab) return do_sphere_table(tab_n, tab_rho, tab_sigma, tab_numeric, tab_out);
    } catch (const nlcurv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlcurv::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

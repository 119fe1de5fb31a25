#include <benchmark/benchmark.h>

#include <cmath>

#include "nlcurv/curvature.hpp"
#include "nlcurv/fracops.hpp"
#include "nlcurv/gridfield.hpp"
#include "nlcurv/quadrature.hpp"
#include "nlcurv/surface.hpp"

using namespace nlcurv;

static void BM_HalfplanePV(benchmark::State& state) {
    SphereScene s(Vec(0, 0, 0), 1.0);
    Vec z(1, 0, 0);
    auto frame = tangent_frame(s, z);
    QuadratureSpec spec;
    spec.n_phi = static_cast<int>(state.range(0));
    for (auto _ : state) {
        double k = halfplane_pv_integral(s, z, frame, frame.tangent[0], 0.5, spec);
        benchmark::DoNotOptimize(k);
    }
}
BENCHMARK(BM_HalfplanePV)->Arg(32)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_CurvatureReport(benchmark::State& state) {
    auto t = make_implicit_scene("torus", {2.0, 0.7});
    QuadratureSpec spec;
    spec.n_dir = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto rep = curvature_report(*t, Vec(2.7, 0, 0), 0.5, spec);
        benchmark::DoNotOptimize(rep.H_volume);
    }
}
BENCHMARK(BM_CurvatureReport)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_SigmaPerimeter(benchmark::State& state) {
    QuadratureSpec spec;
    spec.mc_samples = state.range(0);
    auto ball = [](double r) { return [r](const Vec& x) { return x.norm() < r; }; };
    Box box{Vec(-2, -2, -2), Vec(2, 2, 2)};
    for (auto _ : state) {
        auto est = sigma_perimeter(ball(1.0), ball(2.0), 0.5, box, spec);
        benchmark::DoNotOptimize(est.estimate);
        spec.rng_seed += 1;
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SigmaPerimeter)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

static void BM_FracLaplacian(benchmark::State& state) {
    int N = static_cast<int>(state.range(0));
    auto f = GridField::sample(2, N, 16.0, 1, {DecayClass::gaussian, 0.0},
                               [](const Vec& x, double* o) {
                                   o[0] = std::exp(-0.5 * x.squared_norm());
                               });
    for (auto _ : state) {
        auto g = fracops::frac_laplacian(f, 0.6);
        benchmark::DoNotOptimize(g.data.data());
    }
}
BENCHMARK(BM_FracLaplacian)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

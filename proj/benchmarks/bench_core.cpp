#include <cardinal/inversion.hpp>
#include <cardinal/models.hpp>
#include <cardinal/pricing.hpp>
#include <cardinal/sampling.hpp>

#include <benchmark/benchmark.h>

#include <vector>

using namespace cardinal;

namespace {

const GbmParams kGbm{0.1, 1.0, 0.5, 0.2, 0.1, 100.0, 100.0};

const ModelSpec& gbm_model() {
    static const ModelSpec m = make_model(kGbm);
    return m;
}

SamplingPlan plan_for(double a) {
    SamplingPlan p;
    p.a = {a, a};
    p.trunc = ThresholdTruncation{1e-12};
    return p;
}

const DensityApproximant& approximant(double a) {
    static const DensityApproximant ap = build_density_approximant(
        gbm_model(), plan_for(a), WindowSpec{WindowKind::trapezoid, {a, a}}, ContourShift{{0.5, 0.5}}, kGbm.T);
    return ap;
}

void BM_CharFunction(benchmark::State& state) {
    const std::vector<double> z{0.7, -1.3};
    for (auto _ : state) benchmark::DoNotOptimize(char_function(gbm_model(), std::span<const double>(z), 1.0));
}
BENCHMARK(BM_CharFunction);

void BM_SampleCoefficients(benchmark::State& state) {
    const double a = static_cast<double>(state.range(0));
    const SamplingPlan plan = plan_for(a);
    const ContourShift shift{{0.5, 0.5}};
    const SampledFunction f = [&](std::span<const double> z) {
        return symmetrized_spectrum(gbm_model(), shift, kGbm.T, z);
    };
    SampleOptions opt;
    opt.hermitian = true;
    opt.threads = 1;
    std::size_t kept = 0;
    for (auto _ : state) kept = sample_coefficients(f, plan, opt).size();
    state.counters["coefficients"] = static_cast<double>(kept);
}
BENCHMARK(BM_SampleCoefficients)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Build(benchmark::State& state) {
    const double a = static_cast<double>(state.range(0));
    BuildOptions opt;
    opt.threads = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(build_density_approximant(gbm_model(), plan_for(a),
                                                           WindowSpec{WindowKind::trapezoid, {a, a}},
                                                           ContourShift{{0.5, 0.5}}, kGbm.T, opt));
}
BENCHMARK(BM_Build)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Eval(benchmark::State& state) {
    const DensityApproximant& ap = approximant(12.0);
    const std::vector<double> x{ap.center()[0] + 0.1, ap.center()[1] - 0.05};
    for (auto _ : state) benchmark::DoNotOptimize(ap.eval(x));
}
BENCHMARK(BM_Eval);

void BM_EvalGrid(benchmark::State& state) {
    const DensityApproximant& ap = approximant(12.0);
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> xs1(n), xs2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = -0.5 + static_cast<double>(i) / static_cast<double>(n - 1);
        xs1[i] = ap.center()[0] + t;
        xs2[i] = ap.center()[1] + t;
    }
    for (auto _ : state) benchmark::DoNotOptimize(ap.eval_grid(xs1, xs2));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n));
}
BENCHMARK(BM_EvalGrid)->Arg(41)->Arg(161)->Unit(benchmark::kMillisecond);

void BM_Price(benchmark::State& state) {
    const DensityApproximant& ap = approximant(12.0);
    const SpreadOption opt{5.0, kGbm.T, kGbm.r};
    for (auto _ : state) benchmark::DoNotOptimize(price_spread_density(opt, ap, 32));
}
BENCHMARK(BM_Price)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

// Serial reference vs OpenMP kernel timings.

#include <benchmark/benchmark.h>

#include "crus/cluster.hpp"
#include "crus/ensemble.hpp"
#include "crus/evaluation.hpp"
#include "crus/log.hpp"

using namespace crus;

namespace {

const Dataset& data() {
    static const Dataset d = [] {
        log::set_quiet(true);
        SyntheticConfig c;
        c.blobs = {{2000, 2}, {2000, 20}};
        c.nominal_dims = 1;
        c.seed = 1;
        return gen_synthetic(c);
    }();
    return d;
}

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

void BM_KMeans(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(kmeans_fit(data(), 8, 3, 100, exec_of(s)));
}

void BM_AssignAll(benchmark::State& s) {
    const auto m = kmeans_fit(data(), 8, 3);
    for (auto _ : s) benchmark::DoNotOptimize(assign_all(data(), m, exec_of(s)));
}

void BM_RandomForestFit(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(fit_model(data(), ClassifierSpec::random_forest(50), 5, exec_of(s)));
}

void BM_PredictAll(benchmark::State& s) {
    const auto m = fit_model(data(), ClassifierSpec::random_forest(50), 5);
    for (auto _ : s) benchmark::DoNotOptimize(predict_all(m, data(), exec_of(s)));
}

void BM_CrossValidation(benchmark::State& s) {
    ExperimentSpec spec;
    spec.classifier = ClassifierSpec::j48();
    spec.sampler.kind = SamplerKind::smote;
    for (auto _ : s) benchmark::DoNotOptimize(run_cv(data(), spec, exec_of(s)));
}

}  // namespace

BENCHMARK(BM_KMeans)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssignAll)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RandomForestFit)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictAll)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrossValidation)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "conecanon/certify.hpp"
#include "conecanon/ipm.hpp"
#include "conecanon/ma_solver.hpp"
#include "conecanon/sampling.hpp"

using namespace conecanon;

namespace {

Vec interior(const ConeSpec& s) {
    SampleOptions so;
    so.count = 1;
    so.decades = 1;
    return sample_cone(s, so)[0];
}

void BM_JetLorentz(benchmark::State& st) {
    const ConeSpec s = ConeSpec::lorentz(static_cast<int>(st.range(0)));
    const PotentialHandle F = canonical_potential(s);
    const Vec x = interior(s);
    for (auto _ : st) benchmark::DoNotOptimize(F.jet(x, 3));
}
BENCHMARK(BM_JetLorentz)->Arg(3)->Arg(6)->Arg(12);

void BM_JetPSD(benchmark::State& st) {
    const ConeSpec s = ConeSpec::psd(static_cast<int>(st.range(0)));
    const PotentialHandle F = canonical_potential(s);
    const Vec x = interior(s);
    for (auto _ : st) benchmark::DoNotOptimize(F.jet(x, 3));
}
BENCHMARK(BM_JetPSD)->Arg(2)->Arg(3)->Arg(4);

void BM_SelfConcordance(benchmark::State& st) {
    const ConeSpec s = ConeSpec::lorentz(4);
    const PotentialHandle F = canonical_potential(s);
    SampleOptions so;
    so.count = 100;
    const auto xs = sample_cone(s, so);
    for (auto _ : st) benchmark::DoNotOptimize(self_concordance_sup(F, xs, 8));
}
BENCHMARK(BM_SelfConcordance)->Unit(benchmark::kMillisecond);

void BM_SolveDisk(benchmark::State& st) {
    SolveOptions o;
    o.h = 1.0 / static_cast<double>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(numeric_potential(ConeSpec::lorentz(3), o));
}
BENCHMARK(BM_SolveDisk)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SolveInterval(benchmark::State& st) {
    SolveOptions o;
    o.h = 1.0 / static_cast<double>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(numeric_potential(ConeSpec::orthant(2), o));
}
BENCHMARK(BM_SolveInterval)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_IpmLP(benchmark::State& st) {
    ConicProgram p;
    p.c = Vec::Unit(2, 0);
    p.A = Mat::Ones(1, 2);
    p.b = Vec::Ones(1);
    p.cone = ConeSpec::orthant(2);
    const PotentialHandle F = canonical_potential(p.cone);
    for (auto _ : st) benchmark::DoNotOptimize(solve_conic(p, F));
}
BENCHMARK(BM_IpmLP)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();

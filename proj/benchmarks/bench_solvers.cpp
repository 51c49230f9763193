#include <satdesign/satdesign.hpp>

#include <benchmark/benchmark.h>

using namespace satdesign;

namespace {

struct Setting {
    ModelPtr model;
    DesignSpace region;
    CriterionSpec crit;
};

// Index layout: setting * 2 + criterion, criterion 0 = A, 1 = D.
Setting setting(int index) {
    const CriterionSpec crit = index % 2 == 0 ? CriterionSpec::A() : CriterionSpec::D();
    if (index / 2 == 0) return {make_linexp(1.0, 0.5, -1.0, 1.0), DesignSpace(0.0, 1.0), crit};
    return {make_polynomial(6, EfficiencyFunction{EfficiencyFunction::Kind::jacobi}), DesignSpace(-1.0, 1.0), crit};
}

std::string label(int index) {
    return std::string(index / 2 == 0 ? "linexp " : "polynomial d=6 ") + (index % 2 == 0 ? "A" : "D");
}

void BM_Newton(benchmark::State& state) {
    const Setting s = setting(static_cast<int>(state.range(0)));
    state.SetLabel(label(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(newton_solve(*s.model, s.crit, s.region));
}

void run_owea(benchmark::State& state, bool two_stage) {
    const Setting s = setting(static_cast<int>(state.range(0)));
    GridSpec grid;
    grid.kappa = static_cast<std::size_t>(state.range(1));
    if (two_stage) grid.coarse = std::min<std::size_t>(100, grid.kappa);
    state.SetLabel(label(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(owea_solve(*s.model, s.crit, s.region, grid));
}

void BM_OweaI(benchmark::State& state) { run_owea(state, false); }
void BM_OweaII(benchmark::State& state) { run_owea(state, true); }

void grid_args(benchmark::internal::Benchmark* b) {
    for (int i = 0; i < 4; ++i)
        for (int kappa : {100, 1000, 10000}) b->Args({i, kappa});
}

} // namespace

BENCHMARK(BM_Newton)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OweaI)->Apply(grid_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OweaII)->Apply(grid_args)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

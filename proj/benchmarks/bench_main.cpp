#include <benchmark/benchmark.h>

#include <cmath>

#include "hybisim/bisim.hpp"
#include "hybisim/model.hpp"
#include "hybisim/thermostat.hpp"

namespace {

using namespace hybisim;

const HybridAutomaton& model() {
    static HybridAutomaton h = parse_model(thermostat_model_text());
    return h;
}

void BM_transverse(benchmark::State& state) {
    const HybridAutomaton& h = model();
    FlowConfig cfg;
    int on_safe = h.mode_index("ON_safe");
    Vec start = {0.5, 0.75};  // upper band boundary, flows down to the lower one
    for (auto _ : state) {
        FlowResult r = transverse(h, on_safe, start, cfg);
        benchmark::DoNotOptimize(r.point.data());
    }
}
BENCHMARK(BM_transverse);

void BM_grid_closure(benchmark::State& state) {
    const HybridAutomaton& h = model();
    FlowConfig cfg;
    double eta = 0.05 * std::sqrt(2.0);
    for (auto _ : state) {
        MappedSystem m(h, cfg);
        SampleGrid grid = sample_grid(m, eta);
        FiniteTransitionSystem fts = restriction_system(m, grid);
        benchmark::DoNotOptimize(fts.transitions.size());
    }
}
BENCHMARK(BM_grid_closure)->Unit(benchmark::kMillisecond);

void BM_refinement(benchmark::State& state) {
    const HybridAutomaton& h = model();
    FlowConfig cfg;
    double eta = 0.05 * std::sqrt(2.0);
    for (auto _ : state) {
        MappedSystem m(h, cfg);
        SampleGrid grid = sample_grid(m, eta);
        RefinementResult ref = run_refinement(m, grid, 100);
        benchmark::DoNotOptimize(ref.k_star);
    }
}
BENCHMARK(BM_refinement)->Unit(benchmark::kMillisecond);

void BM_minimize(benchmark::State& state) {
    // A ring of states with two outputs reduces to a two-state quotient.
    FiniteTransitionSystem fts;
    fts.outputs = {"a", "b"};
    fts.inputs = {"u"};
    const int n = 64;
    for (int i = 0; i < n; ++i) {
        fts.output_of.push_back(i % 2);
        fts.transitions.push_back({i, 0, (i + 1) % n});
    }
    for (auto _ : state) {
        MinimizeResult r = minimize_by_behavior(fts);
        benchmark::DoNotOptimize(r.partition.class_count());
    }
}
BENCHMARK(BM_minimize);

}  // namespace

BENCHMARK_MAIN();

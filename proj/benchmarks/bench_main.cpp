#include <benchmark/benchmark.h>

#include "maskcheck/ntt.hpp"
#include "maskcheck/pipeline.hpp"
#include "maskcheck/properties.hpp"
#include "maskcheck/rng.hpp"

using namespace maskcheck;

namespace {

void BM_ZqMul(benchmark::State& state) {
    const Modulus q(static_cast<std::uint64_t>(state.range(0)));
    CounterRng rng(1, 1);
    Zq x = rng.element(q);
    const Zq y = rng.element(q);
    for (auto _ : state) {
        x = x * y + y;
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_ZqMul)->Arg(3329)->Arg(8380417)->Arg((std::int64_t{1} << 62) - 57);

// One pass over every mask of a production modulus.
void BM_WirePreimageCounts(benchmark::State& state) {
    const Modulus q(static_cast<std::uint64_t>(state.range(0)));
    CounterRng rng(2, 2);
    const ButterflyStage stage{rng.element(q)};
    const ShareQuad s{rng.element(q), rng.element(q), rng.element(q), rng.element(q)};
    const std::array<Zq, 4> v{rng.element(q), rng.element(q), rng.element(q), rng.element(q)};
    for (auto _ : state) benchmark::DoNotOptimize(wire_preimage_counts(stage, s, v));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WirePreimageCounts)->Arg(3329)->Arg(8380417);

void BM_PipelineStateAt(benchmark::State& state) {
    const Modulus q(3329);
    const NttPipeline p = lane_pipeline(NttParams(q, 256));
    CounterRng rng(3, 3);
    std::vector<std::uint64_t> vals(3 * p.size());
    for (auto& v : vals) v = rng.uniform(3329);
    const auto rands = PipelineRandomness::from_values(q, vals);
    const PipelineInput in = PipelineInput::from_values(q, 1, 2, 3, 4);
    for (auto _ : state) benchmark::DoNotOptimize(pipeline_state_at(p, rands, p.size() - 1, in));
}
BENCHMARK(BM_PipelineStateAt);

void BM_ForwardNtt(benchmark::State& state) {
    const std::uint64_t qv = static_cast<std::uint64_t>(state.range(0));
    const Modulus q(qv);
    const NttParams params(q, 256);
    CounterRng rng(4, 4);
    std::vector<Zq> x;
    for (int i = 0; i < 256; ++i) x.push_back(rng.element(q));
    for (auto _ : state) benchmark::DoNotOptimize(forward_ntt(params, x));
}
BENCHMARK(BM_ForwardNtt)->Arg(3329)->Arg(8380417);

}  // namespace

BENCHMARK_MAIN();

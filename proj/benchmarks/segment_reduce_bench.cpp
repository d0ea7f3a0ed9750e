#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "segred/benchmark.hpp"
#include "segred/features.hpp"
#include "segred/segment_reduce.hpp"
#include "segred/synth.hpp"

namespace {

using namespace segred;

const SyntheticGraph& cora() {
  static const SyntheticGraph g = [] {
    const auto& shape = reference_graph_shape("cora");
    return synth_graph(shape.nodes, shape.edges, 1);
  }();
  return g;
}

const SegmentedIndex& cora_index() {
  static const SegmentedIndex idx(cora().dst, static_cast<index_t>(cora().num_nodes));
  return idx;
}

void set_counters(benchmark::State& state, std::size_t m, std::size_t f) {
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m * f));
}

// Arg: F. Hand-rule config for that width.
static void BM_SegmentReduceHandRule(benchmark::State& state) {
  const auto f = static_cast<std::size_t>(state.range(0));
  const auto& idx = cora_index();
  const auto x = random_features<float>(idx.size(), f, 1);
  const auto cfg = hand_rule_config(static_cast<std::int64_t>(f));
  ExecOptions exec;
  exec.workers = 1;
  for (auto _ : state) {
    auto y = segment_reduce(idx, x, ReduceOp::sum(), cfg, exec);
    benchmark::DoNotOptimize(y.data().data());
  }
  set_counters(state, idx.size(), f);
}

BENCHMARK(BM_SegmentReduceHandRule)->Arg(1)->Arg(2)->Arg(4)->Arg(32)->Arg(64)->Arg(128);

// Args: F, schedule (0 SR, 1 PR), with a fixed mid-size tile.
static void BM_SegmentReduceSchedule(benchmark::State& state) {
  const auto f = static_cast<std::size_t>(state.range(0));
  const auto& idx = cora_index();
  const auto x = random_features<float>(idx.size(), f, 1);
  const KernelConfig cfg = state.range(1) == 0 ? KernelConfig{Schedule::SR, 32, 8, 8, 1, 1}
                                               : KernelConfig{Schedule::PR, 16, 4, 32, 1, 8};
  ExecOptions exec;
  exec.workers = 1;
  for (auto _ : state) {
    auto y = segment_reduce(idx, x, ReduceOp::sum(), cfg, exec);
    benchmark::DoNotOptimize(y.data().data());
  }
  set_counters(state, idx.size(), f);
}

BENCHMARK(BM_SegmentReduceSchedule)->ArgsProduct({{1, 2, 32, 64}, {0, 1}});

static void BM_Oracle(benchmark::State& state) {
  const auto f = static_cast<std::size_t>(state.range(0));
  const auto& idx = cora_index();
  const auto x = random_features<float>(idx.size(), f, 1);
  for (auto _ : state) {
    auto y = segment_reduce_oracle(idx, x, ReduceOp::sum());
    benchmark::DoNotOptimize(y.data().data());
  }
  set_counters(state, idx.size(), f);
}

BENCHMARK(BM_Oracle)->Arg(2)->Arg(32);

// Arg: fused (1) or gather then reduce (0).
static void BM_GatherReduce(benchmark::State& state) {
  constexpr std::size_t f = 32;
  const auto& g = cora();
  const auto x = random_features<float>(static_cast<std::size_t>(g.num_nodes), f, 2);
  const auto cfg = hand_rule_config(f);
  const bool fused = state.range(0) == 1;
  for (auto _ : state) {
    if (fused) {
      auto y = index_segment_reduce<float>(g.src, cora_index(), x, ReduceOp::sum(), cfg);
      benchmark::DoNotOptimize(y.data().data());
    } else {
      auto y = segment_reduce(cora_index(), gather<float>(g.src, x), ReduceOp::sum(), cfg);
      benchmark::DoNotOptimize(y.data().data());
    }
  }
  set_counters(state, g.src.size(), f);
}

BENCHMARK(BM_GatherReduce)->Arg(0)->Arg(1);

// Arg: index length. Cost should not depend on it.
static void BM_ExtractFeatures(benchmark::State& state) {
  std::vector<index_t> v(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<index_t>(i / 4);
  const SegmentedIndex idx(std::move(v));
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(idx, 32));
}

BENCHMARK(BM_ExtractFeatures)->Arg(1'000)->Arg(10'000'000);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <random>

#include "relkit/kernel.hpp"
#include "relkit/graph.hpp"

using namespace relkit;

namespace {

GroundedGraph random_graph(std::mt19937_64& rng, int n, int labels,
                           double edge_prob) {
  GroundedGraph graph;
  for (int i = 0; i < n; ++i) {
    Vertex v;
    v.label = "l" + std::to_string(rng() % labels);
    v.signature = v.label;
    v.is_entity = true;
    graph.vertices.push_back(std::move(v));
    graph.adjacency.emplace_back();
    ++graph.entity_count;
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (coin(rng) >= edge_prob) continue;
      int e = static_cast<int>(graph.edges.size());
      graph.edges.push_back({a, b, "r"});
      graph.adjacency[a].push_back({b, e});
      graph.adjacency[b].push_back({a, e});
    }
  }
  return graph;
}

}  // namespace

static void BM_features_hard(benchmark::State& state) {
  std::mt19937_64 rng(1);
  GroundedGraph g = random_graph(rng, static_cast<int>(state.range(0)), 6,
                                 8.0 / static_cast<double>(state.range(0)));
  KernelConfig config;
  config.max_radius = 2;
  config.max_distance = 2;
  config.match = MatchKind::Hard;
  for (auto _ : state) {
    SparseFeatureVector phi = features(g, config);
    benchmark::DoNotOptimize(phi);
  }
}
BENCHMARK(BM_features_hard)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_features_soft(benchmark::State& state) {
  std::mt19937_64 rng(2);
  GroundedGraph g = random_graph(rng, static_cast<int>(state.range(0)), 6,
                                 8.0 / static_cast<double>(state.range(0)));
  KernelConfig config;
  config.max_radius = 2;
  config.max_distance = 2;
  config.match = MatchKind::Soft;
  for (auto _ : state) {
    SparseFeatureVector phi = features(g, config);
    benchmark::DoNotOptimize(phi);
  }
}
BENCHMARK(BM_features_soft)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_pseudo_identifier(benchmark::State& state) {
  std::mt19937_64 rng(3);
  GroundedGraph g = random_graph(rng, static_cast<int>(state.range(0)), 4, 0.3);
  for (auto _ : state) {
    for (size_t v = 0; v < g.vertices.size(); ++v) {
      std::uint64_t pid =
          pseudo_identifier(g, neighborhood(g, static_cast<int>(v), 2));
      benchmark::DoNotOptimize(pid);
    }
  }
}
BENCHMARK(BM_pseudo_identifier)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_pairwise_kernel(benchmark::State& state) {
  std::mt19937_64 rng(4);
  GroundedGraph a = random_graph(rng, 24, 4, 0.25);
  GroundedGraph b = random_graph(rng, 24, 4, 0.25);
  KernelConfig config;
  config.max_radius = 1;
  config.max_distance = 2;
  for (auto _ : state) {
    double value = kernel(a, b, config);
    benchmark::DoNotOptimize(value);
  }
}
BENCHMARK(BM_pairwise_kernel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "relkit/dataset.hpp"
#include "relkit/graph.hpp"
#include "relkit/schema.hpp"

#ifndef RELKIT_FIXTURE_DIR
#define RELKIT_FIXTURE_DIR "tests/fixtures"
#endif

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
  return std::string(RELKIT_FIXTURE_DIR) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Bare labeled graph for kernel tests; entity/relation structure is not
/// needed by the kernel functions.
inline relkit::GroundedGraph make_graph(
    const std::vector<std::string>& labels,
    const std::vector<std::tuple<int, int, std::string>>& edges) {
  relkit::GroundedGraph graph;
  for (const auto& label : labels) {
    relkit::Vertex v;
    v.label = label;
    v.signature = label;
    v.is_entity = true;
    graph.vertices.push_back(std::move(v));
    graph.adjacency.emplace_back();
    ++graph.entity_count;
  }
  for (const auto& [a, b, role] : edges) {
    int e = static_cast<int>(graph.edges.size());
    graph.edges.push_back({a, b, role});
    graph.adjacency[a].push_back({b, e});
    graph.adjacency[b].push_back({a, e});
  }
  return graph;
}

inline relkit::GroundedGraph random_graph(std::mt19937_64& rng,
                                          int max_vertices, int num_labels,
                                          double edge_prob,
                                          int num_edge_labels = 2) {
  int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_vertices));
  std::vector<std::string> labels;
  labels.reserve(n);
  for (int i = 0; i < n; ++i)
    labels.push_back("l" + std::to_string(rng() % num_labels));
  std::vector<std::tuple<int, int, std::string>> edges;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (coin(rng) < edge_prob)
        edges.emplace_back(a, b, "r" + std::to_string(rng() % num_edge_labels));
  return make_graph(labels, edges);
}

/// Vertex renaming: same labels and structure under a permutation.
inline relkit::GroundedGraph permute_graph(const relkit::GroundedGraph& graph,
                                           const std::vector<int>& perm) {
  std::vector<std::string> labels(graph.vertices.size());
  for (size_t v = 0; v < graph.vertices.size(); ++v)
    labels[perm[v]] = graph.vertices[v].label;
  std::vector<std::tuple<int, int, std::string>> edges;
  for (const auto& edge : graph.edges)
    edges.emplace_back(perm[edge.entity], perm[edge.relation], edge.role);
  return make_graph(labels, edges);
}

}  // namespace testsupport

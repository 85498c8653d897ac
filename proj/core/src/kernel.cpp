#include "relkit/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <memory>

#include "relkit/error.hpp"
#include "relkit/hashing.hpp"

namespace relkit {

namespace {

using hashing::Fnv64;

// tag bytes separating the levels of the chained hash construction
constexpr std::uint8_t kTagDistancePair = 0x01;
constexpr std::uint8_t kTagVertexEncoding = 0x02;
constexpr std::uint8_t kTagEdgeEncoding = 0x03;
constexpr std::uint8_t kTagGraphEncoding = 0x04;
constexpr std::uint8_t kTagVertexListEncoding = 0x05;
constexpr std::uint8_t kTagFeatureHard = 0x11;
constexpr std::uint8_t kTagFeatureSoft = 0x12;
constexpr std::uint8_t kTagFeatureTupleHard = 0x13;
constexpr std::uint8_t kTagFeatureTupleSoft = 0x14;

constexpr int kUnreachable = std::numeric_limits<int>::max();

std::vector<int> bfs_distances(const GroundedGraph& graph, int source,
                               int bound) {
  std::vector<int> dist(graph.vertices.size(), kUnreachable);
  dist[source] = 0;
  std::deque<int> queue{source};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    if (dist[v] >= bound) continue;
    for (const auto& [u, edge] : graph.adjacency[v]) {
      if (dist[u] != kUnreachable) continue;
      dist[u] = dist[v] + 1;
      queue.push_back(u);
    }
  }
  return dist;
}

/// Per-(vertex, radius) data reused across pair enumeration: the subgraph,
/// its pseudo-identifier, the canonical encoding hash of every member, and
/// the member label histogram.
struct NeighborhoodInfo {
  NeighborhoodSubgraph sub;
  std::uint64_t pid = 0;
  std::vector<std::uint64_t> member_hash;        // parallel to sub.members
  std::map<std::uint64_t, int> label_histogram;  // label hash -> count
};

/// Canonical vertex encodings inside one rooted subgraph, then the graph
/// hash over the sorted edge encodings (vertex encodings for edgeless
/// subgraphs).
void encode_subgraph(const GroundedGraph& graph, NeighborhoodSubgraph& sub,
                     std::uint64_t& pid_out,
                     std::vector<std::uint64_t>& member_hash_out) {
  const auto& members = sub.members;
  const size_t k = members.size();
  std::vector<int> local_of(graph.vertices.size(), -1);
  for (size_t i = 0; i < k; ++i) local_of[members[i]] = static_cast<int>(i);

  // induced adjacency and edge list
  std::vector<std::vector<int>> adjacency(k);
  sub.edge_list.clear();
  sub.edge_ids.clear();
  for (size_t i = 0; i < k; ++i) {
    int v = members[i];
    for (const auto& [u, edge] : graph.adjacency[v]) {
      if (local_of[u] < 0) continue;
      adjacency[i].push_back(local_of[u]);
      if (v < u) {
        sub.edge_list.push_back({v, u});
        sub.edge_ids.push_back(edge);
      }
    }
  }

  // all-pairs distances inside the subgraph
  std::vector<std::vector<int>> dist(k, std::vector<int>(k, kUnreachable));
  for (size_t s = 0; s < k; ++s) {
    dist[s][s] = 0;
    std::deque<int> queue{static_cast<int>(s)};
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int u : adjacency[v]) {
        if (dist[s][u] != kUnreachable) continue;
        dist[s][u] = dist[s][v] + 1;
        queue.push_back(u);
      }
    }
  }

  int root_local = local_of[sub.root];

  // L^v: sorted (distance, label) pairs prefixed by the distance from root
  member_hash_out.assign(k, 0);
  std::vector<std::pair<int, const std::string*>> pairs;
  for (size_t i = 0; i < k; ++i) {
    pairs.clear();
    pairs.reserve(k);
    for (size_t j = 0; j < k; ++j)
      pairs.emplace_back(dist[i][j], &graph.vertices[members[j]].label);
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first < b.first;
                return *a.second < *b.second;
              });
    Fnv64 vh(kTagVertexEncoding);
    vh.u64(static_cast<std::uint64_t>(dist[i][root_local]));
    vh.u64(pairs.size());
    for (const auto& [d, label] : pairs) {
      Fnv64 ph(kTagDistancePair);
      ph.u64(static_cast<std::uint64_t>(d));
      ph.str(*label);
      vh.u64(ph.digest());
    }
    member_hash_out[i] = vh.digest();
  }

  // L^e over induced edges, L^g over the sorted edge hash list
  if (!sub.edge_list.empty()) {
    std::vector<std::uint64_t> edge_hashes;
    edge_hashes.reserve(sub.edge_list.size());
    for (size_t e = 0; e < sub.edge_list.size(); ++e) {
      std::uint64_t h1 = member_hash_out[local_of[sub.edge_list[e].first]];
      std::uint64_t h2 = member_hash_out[local_of[sub.edge_list[e].second]];
      Fnv64 eh(kTagEdgeEncoding);
      eh.u64(std::min(h1, h2));
      eh.u64(std::max(h1, h2));
      eh.str(graph.edges[sub.edge_ids[e]].role);
      edge_hashes.push_back(eh.digest());
    }
    std::sort(edge_hashes.begin(), edge_hashes.end());
    Fnv64 gh(kTagGraphEncoding);
    gh.u64(edge_hashes.size());
    for (std::uint64_t h : edge_hashes) gh.u64(h);
    pid_out = gh.digest();
  } else {
    std::vector<std::uint64_t> vertex_hashes = member_hash_out;
    std::sort(vertex_hashes.begin(), vertex_hashes.end());
    Fnv64 gh(kTagVertexListEncoding);
    gh.u64(vertex_hashes.size());
    for (std::uint64_t h : vertex_hashes) gh.u64(h);
    pid_out = gh.digest();
  }
}

class KernelContext {
 public:
  KernelContext(const GroundedGraph& graph, const KernelConfig& config)
      : graph_(graph), config_(config) {
    int n = static_cast<int>(graph.vertices.size());
    label_hash_.resize(n);
    gate_hash_.resize(n);
    bool tuple_mode = config.tuple_mode != TupleMode::Discrete;
    for (int v = 0; v < n; ++v) {
      label_hash_[v] = hashing::hash_str(graph.vertices[v].label);
      // in tuple modes only the signature gates root comparisons
      gate_hash_[v] = tuple_mode
                          ? hashing::hash_str(graph.vertices[v].signature)
                          : label_hash_[v];
    }
    distance_cache_.resize(n);
    info_cache_.resize(static_cast<size_t>(n) * (config.max_radius + 1));
  }

  const GroundedGraph& graph() const { return graph_; }
  std::uint64_t label_hash(int v) const { return label_hash_[v]; }
  std::uint64_t gate_hash(int v) const { return gate_hash_[v]; }

  const std::vector<int>& distances(int v) {
    if (distance_cache_[v].empty())
      distance_cache_[v] = bfs_distances(
          graph_, v, std::max(config_.max_radius, config_.max_distance));
    return distance_cache_[v];
  }

  const NeighborhoodInfo& info(int v, int r) {
    auto& slot = info_cache_[static_cast<size_t>(v) * (config_.max_radius + 1) +
                             static_cast<size_t>(r)];
    if (!slot) {
      auto fresh = std::make_unique<NeighborhoodInfo>();
      fresh->sub = make_neighborhood(v, r);
      encode_subgraph(graph_, fresh->sub, fresh->pid, fresh->member_hash);
      for (int member : fresh->sub.members)
        fresh->label_histogram[label_hash_[member]] += 1;
      slot = std::move(fresh);
    }
    return *slot;
  }

  NeighborhoodSubgraph make_neighborhood(int v, int r) {
    NeighborhoodSubgraph sub;
    sub.root = v;
    sub.radius = r;
    const auto& dist = distances(v);
    for (size_t u = 0; u < dist.size(); ++u)
      if (dist[u] <= r) sub.members.push_back(static_cast<int>(u));
    return sub;
  }

  /// Ordered root pairs at distance d, honoring kernel-point and viewpoint
  /// restrictions.
  std::vector<std::pair<int, int>> root_pairs(int d,
                                              const std::vector<int>* first_roots) {
    std::vector<std::pair<int, int>> out;
    int n = static_cast<int>(graph_.vertices.size());
    auto eligible = [&](int v) {
      return !config_.use_kernel_points || graph_.vertices[v].kernel_point;
    };
    auto emit_from = [&](int u) {
      if (!eligible(u)) return;
      const auto& dist = distances(u);
      for (int v = 0; v < n; ++v)
        if (dist[v] == d && eligible(v)) out.emplace_back(u, v);
    };
    if (first_roots) {
      for (int u : *first_roots) emit_from(u);
    } else {
      for (int u = 0; u < n; ++u) emit_from(u);
    }
    return out;
  }

 private:
  const GroundedGraph& graph_;
  KernelConfig config_;
  std::vector<std::uint64_t> label_hash_;
  std::vector<std::uint64_t> gate_hash_;
  std::vector<std::vector<int>> distance_cache_;
  std::vector<std::unique_ptr<NeighborhoodInfo>> info_cache_;
};

std::uint64_t index_mask(int hash_bits) {
  return hash_bits >= 64 ? ~0ull : ((1ull << hash_bits) - 1);
}

/// Combined vertex multiset of a neighborhood pair: members of A then
/// members of B, each occurrence tagged with its subgraph-local canonical
/// hash.
struct PairOccurrence {
  int vertex;
  std::uint64_t canonical;  // L^v hash inside its own subgraph
};

void collect_occurrences(const NeighborhoodInfo& a, const NeighborhoodInfo& b,
                         std::vector<PairOccurrence>& out) {
  out.clear();
  for (size_t i = 0; i < a.sub.members.size(); ++i)
    out.push_back({a.sub.members[i], a.member_hash[i]});
  for (size_t i = 0; i < b.sub.members.size(); ++i)
    out.push_back({b.sub.members[i], b.member_hash[i]});
}

// ---------------------------------------------------------------------------
// pairwise reference route

double tuple_pair_sum(const GroundedGraph& ga, const GroundedGraph& gb,
                      const std::vector<PairOccurrence>& occ_a,
                      const std::vector<PairOccurrence>& occ_b,
                      const KernelConfig& config) {
  double sum = 0.0;
  bool hard = config.match == MatchKind::Hard;
  for (const auto& oa : occ_a) {
    const Vertex& va = ga.vertices[oa.vertex];
    for (const auto& ob : occ_b) {
      const Vertex& vb = gb.vertices[ob.vertex];
      if (hard) {
        if (oa.canonical != ob.canonical) continue;
      } else {
        if (va.signature != vb.signature) continue;
      }
      if (va.signature != vb.signature) continue;
      sum += kappa_tuple(va, vb, config.tuple_mode, config.match);
    }
  }
  return sum;
}

double kappa_rd_impl(KernelContext& ca, KernelContext& cb, int r, int d,
                     const KernelConfig& config) {
  auto pairs_a = ca.root_pairs(d, nullptr);
  auto pairs_b = cb.root_pairs(d, nullptr);
  if (pairs_a.empty() || pairs_b.empty()) return 0.0;

  double total = 0.0;
  std::vector<PairOccurrence> occ_a, occ_b;
  for (const auto& [u, v] : pairs_a) {
    const NeighborhoodInfo& a1 = ca.info(u, r);
    const NeighborhoodInfo& a2 = ca.info(v, r);
    for (const auto& [u2, v2] : pairs_b) {
      // kappa_root: same root labels on both endpoints
      if (ca.gate_hash(u) != cb.gate_hash(u2)) continue;
      if (ca.gate_hash(v) != cb.gate_hash(v2)) continue;
      const NeighborhoodInfo& b1 = cb.info(u2, r);
      const NeighborhoodInfo& b2 = cb.info(v2, r);

      if (config.tuple_mode == TupleMode::Discrete) {
        if (config.match == MatchKind::Hard) {
          if (a1.pid == b1.pid && a2.pid == b2.pid) total += 1.0;
        } else {
          // histogram over the combined label multisets
          double dot = 0.0;
          for (const auto& [label, count_a1] : a1.label_histogram) {
            int count = count_a1;
            auto it2 = a2.label_histogram.find(label);
            if (it2 != a2.label_histogram.end()) count += it2->second;
            int other = 0;
            auto itb1 = b1.label_histogram.find(label);
            if (itb1 != b1.label_histogram.end()) other += itb1->second;
            auto itb2 = b2.label_histogram.find(label);
            if (itb2 != b2.label_histogram.end()) other += itb2->second;
            dot += static_cast<double>(count) * other;
          }
          for (const auto& [label, count_a2] : a2.label_histogram) {
            if (a1.label_histogram.count(label)) continue;  // already counted
            int other = 0;
            auto itb1 = b1.label_histogram.find(label);
            if (itb1 != b1.label_histogram.end()) other += itb1->second;
            auto itb2 = b2.label_histogram.find(label);
            if (itb2 != b2.label_histogram.end()) other += itb2->second;
            dot += static_cast<double>(count_a2) * other;
          }
          total += dot;
        }
      } else {
        collect_occurrences(a1, a2, occ_a);
        collect_occurrences(b1, b2, occ_b);
        total += tuple_pair_sum(ca.graph(), cb.graph(), occ_a, occ_b, config);
      }
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// explicit feature map

void block_features(KernelContext& ctx, const KernelConfig& config, int r,
                    int d, const std::vector<int>* first_roots,
                    SparseFeatureVector& block) {
  std::uint64_t mask = index_mask(config.hash_bits);
  auto pairs = ctx.root_pairs(d, first_roots);
  std::vector<PairOccurrence> occ;
  for (const auto& [u, v] : pairs) {
    const NeighborhoodInfo& a = ctx.info(u, r);
    const NeighborhoodInfo& b = ctx.info(v, r);
    switch (config.tuple_mode) {
      case TupleMode::Discrete: {
        if (config.match == MatchKind::Hard) {
          Fnv64 h(kTagFeatureHard);
          h.u64(static_cast<std::uint64_t>(r));
          h.u64(static_cast<std::uint64_t>(d));
          h.u64(a.pid);
          h.u64(b.pid);
          h.u64(ctx.gate_hash(u));
          h.u64(ctx.gate_hash(v));
          block.add(h.digest() & mask, 1.0);
        } else {
          Fnv64 context(kTagFeatureSoft);
          context.u64(static_cast<std::uint64_t>(r));
          context.u64(static_cast<std::uint64_t>(d));
          context.u64(ctx.gate_hash(u));
          context.u64(ctx.gate_hash(v));
          std::uint64_t base = context.digest();
          for (const auto& [label, count] : a.label_histogram) {
            Fnv64 h;
            h.u64(base);
            h.u64(label);
            block.add(h.digest() & mask, count);
          }
          for (const auto& [label, count] : b.label_histogram) {
            Fnv64 h;
            h.u64(base);
            h.u64(label);
            block.add(h.digest() & mask, count);
          }
        }
        break;
      }
      case TupleMode::Real:
      case TupleMode::Mixed: {
        bool hard = config.match == MatchKind::Hard;
        Fnv64 context(hard ? kTagFeatureTupleHard : kTagFeatureTupleSoft);
        context.u64(static_cast<std::uint64_t>(r));
        context.u64(static_cast<std::uint64_t>(d));
        context.u64(ctx.gate_hash(u));
        context.u64(ctx.gate_hash(v));
        std::uint64_t base = context.digest();
        collect_occurrences(a, b, occ);
        for (const auto& o : occ) {
          const Vertex& vertex = ctx.graph().vertices[o.vertex];
          Fnv64 gate;
          gate.u64(base);
          if (hard)
            gate.u64(o.canonical);
          else
            gate.u64(hashing::hash_str(vertex.signature));
          std::uint64_t gate_base = gate.digest();
          if (config.tuple_mode == TupleMode::Mixed) {
            if (hard) {
              // joint match over the whole discrete tuple
              Fnv64 h;
              h.u64(gate_base);
              h.byte('D');
              h.u64(vertex.discrete_props.size());
              for (const auto& value : vertex.discrete_props) h.str(value);
              block.add(h.digest() & mask, 1.0);
            } else {
              // per-column independent matches
              for (size_t j = 0; j < vertex.discrete_props.size(); ++j) {
                Fnv64 h;
                h.u64(gate_base);
                h.byte('d');
                h.u64(j);
                h.str(vertex.discrete_props[j]);
                block.add(h.digest() & mask, 1.0);
              }
            }
          }
          for (size_t c = 0; c < vertex.numeric_props.size(); ++c) {
            Fnv64 h;
            h.u64(gate_base);
            h.byte('n');
            h.u64(c);
            block.add(h.digest() & mask, vertex.numeric_props[c]);
          }
        }
        break;
      }
    }
  }
}

SparseFeatureVector features_impl(const GroundedGraph& graph,
                                  const KernelConfig& config,
                                  const std::vector<int>* first_roots) {
  config.validate();
  SparseFeatureVector out;
  if (graph.empty()) return out;
  KernelContext ctx(graph, config);
  for (int r = 0; r <= config.max_radius; ++r) {
    for (int d = 0; d <= config.max_distance; ++d) {
      SparseFeatureVector block;
      block_features(ctx, config, r, d, first_roots, block);
      double norm = block.squared_norm();
      if (norm <= 0.0) continue;
      block.scale(1.0 / std::sqrt(norm));
      out.merge(block);
    }
  }
  return out;
}

}  // namespace

const char* match_kind_name(MatchKind match) {
  return match == MatchKind::Hard ? "hard" : "soft";
}

const char* tuple_mode_name(TupleMode mode) {
  switch (mode) {
    case TupleMode::Discrete: return "discrete";
    case TupleMode::Real: return "real";
    case TupleMode::Mixed: return "mixed";
  }
  return "?";
}

void KernelConfig::validate() const {
  if (max_radius < 0 || max_distance < 0)
    throw Error(ErrorKind::UsageError,
                "kernel radius and distance bounds must be nonnegative");
  if (hash_bits < 16 || hash_bits > 64)
    throw Error(ErrorKind::UsageError, "hash_bits must lie in [16, 64]");
}

TupleMode derive_tuple_mode(const Schema& schema,
                            const PropertyKindTable& kinds) {
  bool has_numeric = false;
  bool has_categorical = false;
  for (const auto& sig : schema.signatures) {
    for (int col : sig.property_columns()) {
      if (kinds.kind(sig.name, col) == PropertyKind::Numeric)
        has_numeric = true;
      else
        has_categorical = true;
    }
  }
  if (!has_numeric) return TupleMode::Discrete;
  return has_categorical ? TupleMode::Mixed : TupleMode::Real;
}

NeighborhoodSubgraph neighborhood(const GroundedGraph& graph, int v, int r) {
  if (v < 0 || static_cast<size_t>(v) >= graph.vertices.size())
    throw Error(ErrorKind::VertexNotFound,
                "vertex " + std::to_string(v) + " not in graph");
  if (r < 0)
    throw Error(ErrorKind::UsageError, "neighborhood radius must be >= 0");
  NeighborhoodSubgraph sub;
  sub.root = v;
  sub.radius = r;
  auto dist = bfs_distances(graph, v, r);
  for (size_t u = 0; u < dist.size(); ++u)
    if (dist[u] <= r) sub.members.push_back(static_cast<int>(u));
  // induced edges, each undirected edge listed once
  std::vector<bool> in(graph.vertices.size(), false);
  for (int m : sub.members) in[m] = true;
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& edge = graph.edges[e];
    if (in[edge.entity] && in[edge.relation]) {
      sub.edge_list.push_back({std::min(edge.entity, edge.relation),
                               std::max(edge.entity, edge.relation)});
      sub.edge_ids.push_back(static_cast<int>(e));
    }
  }
  return sub;
}

std::uint64_t pseudo_identifier(const GroundedGraph& graph,
                                const NeighborhoodSubgraph& sub) {
  NeighborhoodSubgraph copy = sub;
  std::uint64_t pid = 0;
  std::vector<std::uint64_t> member_hashes;
  encode_subgraph(graph, copy, pid, member_hashes);
  return pid;
}

std::vector<RootPair> kernel_pairs(const GroundedGraph& graph,
                                   const KernelConfig& config,
                                   const std::vector<int>* first_roots) {
  config.validate();
  std::vector<RootPair> out;
  if (graph.empty()) return out;
  KernelContext ctx(graph, config);
  for (int d = 0; d <= config.max_distance; ++d) {
    auto pairs = ctx.root_pairs(d, first_roots);
    for (int r = 0; r <= config.max_radius; ++r)
      for (const auto& [u, v] : pairs) out.push_back({u, v, r, d});
  }
  return out;
}

double kappa_rd(const GroundedGraph& a, const GroundedGraph& b, int r, int d,
                const KernelConfig& config) {
  config.validate();
  if (a.empty() || b.empty()) return 0.0;
  KernelConfig local = config;
  if (local.max_radius < r) local.max_radius = r;
  if (local.max_distance < d) local.max_distance = d;
  KernelContext ca(a, local);
  KernelContext cb(b, local);
  return kappa_rd_impl(ca, cb, r, d, local);
}

double kappa_rd_hard(const GroundedGraph& a, const GroundedGraph& b, int r,
                     int d) {
  KernelConfig config;
  config.match = MatchKind::Hard;
  config.tuple_mode = TupleMode::Discrete;
  config.max_radius = r;
  config.max_distance = d;
  return kappa_rd(a, b, r, d, config);
}

double kappa_rd_soft(const GroundedGraph& a, const GroundedGraph& b, int r,
                     int d) {
  KernelConfig config;
  config.match = MatchKind::Soft;
  config.tuple_mode = TupleMode::Discrete;
  config.max_radius = r;
  config.max_distance = d;
  return kappa_rd(a, b, r, d, config);
}

double kappa_tuple(const Vertex& v, const Vertex& w, TupleMode mode,
                   MatchKind match) {
  if (v.signature != w.signature)
    throw Error(ErrorKind::SignatureMismatch,
                "tuple kernel between '" + v.signature + "' and '" +
                    w.signature + "'");
  double discrete = 0.0;
  double real = 0.0;
  size_t dn = std::min(v.discrete_props.size(), w.discrete_props.size());
  if (match == MatchKind::Hard) {
    discrete = v.discrete_props == w.discrete_props ? 1.0 : 0.0;
  } else {
    for (size_t j = 0; j < dn; ++j)
      if (v.discrete_props[j] == w.discrete_props[j]) discrete += 1.0;
  }
  size_t cn = std::min(v.numeric_props.size(), w.numeric_props.size());
  for (size_t c = 0; c < cn; ++c) real += v.numeric_props[c] * w.numeric_props[c];

  switch (mode) {
    case TupleMode::Discrete: return discrete;
    case TupleMode::Real: return real;
    case TupleMode::Mixed: return discrete + real;
  }
  return 0.0;
}

double normalize_rd(double kappa_ab, double kappa_aa, double kappa_bb) {
  if (kappa_aa <= 0.0 || kappa_bb <= 0.0) return 0.0;
  return kappa_ab / std::sqrt(kappa_aa * kappa_bb);
}

double kernel(const GroundedGraph& a, const GroundedGraph& b,
              const KernelConfig& config) {
  config.validate();
  if (a.empty() || b.empty()) return 0.0;
  KernelContext ca(a, config);
  KernelContext cb(b, config);
  double total = 0.0;
  for (int r = 0; r <= config.max_radius; ++r) {
    for (int d = 0; d <= config.max_distance; ++d) {
      double ab = kappa_rd_impl(ca, cb, r, d, config);
      double aa = kappa_rd_impl(ca, ca, r, d, config);
      double bb = kappa_rd_impl(cb, cb, r, d, config);
      total += normalize_rd(ab, aa, bb);
    }
  }
  return total;
}

SparseFeatureVector features(const GroundedGraph& graph,
                             const KernelConfig& config) {
  return features_impl(graph, config, nullptr);
}

SparseFeatureVector features_for_case(const GroundedGraph& graph,
                                      const std::vector<int>& wc,
                                      const KernelConfig& config) {
  return features_impl(graph, config, &wc);
}

}  // namespace relkit

#pragma once

#include <cstdint>
#include <vector>

#include "relkit/dataset.hpp"
#include "relkit/graph.hpp"
#include "relkit/schema.hpp"
#include "relkit/sparse.hpp"

namespace relkit {

enum class MatchKind { Hard, Soft };
enum class TupleMode { Discrete, Real, Mixed };

const char* match_kind_name(MatchKind match);
const char* tuple_mode_name(TupleMode mode);

struct KernelConfig {
  int max_radius = 2;    // r*
  int max_distance = 2;  // d*
  MatchKind match = MatchKind::Hard;
  TupleMode tuple_mode = TupleMode::Discrete;
  bool use_kernel_points = false;
  int hash_bits = 64;

  void validate() const;  // r*,d* >= 0, hash_bits in [16,64]
  bool operator==(const KernelConfig&) const = default;
};

/// Mixed when the declared signatures carry both categorical and numeric
/// property columns, Real when only numeric, Discrete otherwise.
TupleMode derive_tuple_mode(const Schema& schema,
                            const PropertyKindTable& kinds);

/// Topological ball: the subgraph induced by the vertices within
/// shortest-path distance r of the root. Unreachable vertices are excluded
/// (infinite-distance convention).
struct NeighborhoodSubgraph {
  int root = 0;
  int radius = 0;
  std::vector<int> members;                     // sorted graph indices
  std::vector<std::pair<int, int>> edge_list;   // induced edges (graph indices)
  std::vector<int> edge_ids;                    // parallel, edge index in graph
};

NeighborhoodSubgraph neighborhood(const GroundedGraph& graph, int v, int r);

/// Hash of the graph-invariant encoding of a rooted neighborhood: vertices
/// are relabeled by their sorted distance-label pair lists (prefixed with the
/// distance from the root), edges by their endpoint relabelings plus the edge
/// label, and the graph by its sorted edge encoding list. Edgeless subgraphs
/// hash their vertex encoding list instead. Isomorphic rooted labeled graphs
/// receive equal values.
std::uint64_t pseudo_identifier(const GroundedGraph& graph,
                                const NeighborhoodSubgraph& sub);

struct RootPair {
  int first_root = 0;
  int second_root = 0;
  int radius = 0;
  int distance = 0;
};

/// Every ordered root pair at shortest-path distance d <= d*, for every
/// radius r <= r*. With use_kernel_points both roots must be kernel points;
/// a non-null first_roots restricts the first root (viewpoint kernels).
std::vector<RootPair> kernel_pairs(const GroundedGraph& graph,
                                   const KernelConfig& config,
                                   const std::vector<int>* first_roots = nullptr);

/// kappa_{r,d} by explicit double summation over neighborhood pairs (the
/// reference route; feature extraction is the production route). Dispatches
/// on the configured match and tuple mode.
double kappa_rd(const GroundedGraph& a, const GroundedGraph& b, int r, int d,
                const KernelConfig& config);

/// Exact-match kappa_{r,d}: root labels gate, isomorphism approximated by
/// pseudo-identifier equality.
double kappa_rd_hard(const GroundedGraph& a, const GroundedGraph& b, int r,
                     int d);

/// Soft-match kappa_{r,d}: per neighborhood pair, the label histogram over
/// the combined vertex multiset; kernel value is the sum of histogram dot
/// products gated by root labels.
double kappa_rd_soft(const GroundedGraph& a, const GroundedGraph& b, int r,
                     int d);

/// Tuple kernel between two vertices of the same signature: soft-discrete
/// counts per-column matches, hard-discrete requires a joint match, real
/// tuples use the dot product, mixed adds the two parts.
double kappa_tuple(const Vertex& v, const Vertex& w, TupleMode mode,
                   MatchKind match);

/// kappa / sqrt(self * self'); 0 when either self-kernel is 0.
double normalize_rd(double kappa_ab, double kappa_aa, double kappa_bb);

/// Sum of normalized kappa_{r,d} over r <= r*, d <= d*.
double kernel(const GroundedGraph& a, const GroundedGraph& b,
              const KernelConfig& config);

/// Explicit feature map: per (r,d) block, features hashed into hash_bits and
/// the block scaled to unit Euclidean norm, so dot products reproduce the
/// normalized kernel (up to index hash collisions).
SparseFeatureVector features(const GroundedGraph& graph,
                             const KernelConfig& config);

/// Viewpoint features on a mutilated graph: first roots restricted to W_c.
SparseFeatureVector features_for_case(const GroundedGraph& graph,
                                      const std::vector<int>& wc,
                                      const KernelConfig& config);

}  // namespace relkit

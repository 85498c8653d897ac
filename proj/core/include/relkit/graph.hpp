#pragma once

#include <map>
#include <string>
#include <vector>

#include "relkit/atom.hpp"
#include "relkit/dataset.hpp"
#include "relkit/schema.hpp"

namespace relkit {

// Vertex labels never contain identifiers: signature name and property
// values (declared column order) joined by this separator byte.
inline constexpr char kLabelSeparator = '\x1f';

struct Vertex {
  std::string label;      // signature + categorical property values
  std::string signature;
  bool is_entity = false;
  bool kernel_point = false;
  std::vector<std::string> ids;  // identifiers of the ground atom (bookkeeping)
  std::vector<std::string> discrete_props;
  std::vector<double> numeric_props;
};

struct GraphEdge {
  int entity = 0;    // index into vertices, entity side
  int relation = 0;  // index into vertices, relation side
  std::string role;
};

/// The bipartite labeled graph of one interpretation: one entity vertex per
/// E-relation atom, one relation vertex per R-relation atom, edges labeled by
/// the role under which the entity's identifier appears.
struct GroundedGraph {
  std::vector<Vertex> vertices;
  std::vector<GraphEdge> edges;
  std::vector<std::vector<std::pair<int, int>>> adjacency;  // (vertex, edge)
  std::map<Atom, int> atom_vertex;
  std::map<std::string, int> entity_of_id;

  int entity_count = 0;
  int relation_count = 0;

  int vertex_of(const Atom& atom) const {
    auto it = atom_vertex.find(atom);
    return it == atom_vertex.end() ? -1 : it->second;
  }
  int degree(int v) const { return static_cast<int>(adjacency[v].size()); }
  bool empty() const { return vertices.empty(); }
};

/// Builds G_z from the declared atoms (undeclared predicates are skipped).
/// DanglingIdentifier when a relationship references an identifier that no
/// entity atom introduces.
GroundedGraph graphicalize(const Schema& schema, const AtomSet& atoms,
                           const PropertyKindTable& kinds);

/// Appends a relationship vertex for `atom` (with its role edges) to an
/// already-built graph. With strip_properties the vertex label carries the
/// signature name only, as needed for case atoms whose properties are the
/// prediction target.
int add_relation_vertex(GroundedGraph& graph, const Schema& schema,
                        const PropertyKindTable& kinds, const Atom& atom,
                        bool strip_properties);

struct Viewpoint {
  Atom case_atom;
  int case_vertex = -1;            // in the mutilated graph
  std::vector<int> wc;             // vertices adjacent to the case
  GroundedGraph graph;             // mutilated graph G_c
};

/// Removes every vertex of y_atoms except the case (and incident edges).
/// CaseNotInGraph when the case atom has no vertex.
Viewpoint build_viewpoint(const GroundedGraph& graph, const AtomSet& y_atoms,
                          const Atom& case_atom);

/// DOT text: entity vertices boxed, relation vertices oval, edge labels are
/// roles.
std::string export_dot(const GroundedGraph& graph);

/// One `u <tab> v <tab> role` line per edge, for debugging.
std::string export_adjacency(const GroundedGraph& graph);

}  // namespace relkit

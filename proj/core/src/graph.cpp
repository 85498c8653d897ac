#include "relkit/graph.hpp"

#include <algorithm>

#include "relkit/error.hpp"

namespace relkit {

namespace {

std::string make_label(const Signature& sig, const Atom& atom,
                       const PropertyKindTable& kinds,
                       std::vector<std::string>& discrete_out,
                       std::vector<double>& numeric_out) {
  std::string label = sig.name;
  for (int col : sig.property_columns()) {
    const Constant& value = atom.args[col];
    if (kinds.kind(sig.name, col) == PropertyKind::Numeric) {
      // numeric values feed the tuple kernels, never the discrete label
      numeric_out.push_back(value.numeric ? value.value : 0.0);
    } else {
      label += kLabelSeparator;
      label += value.text;
      discrete_out.push_back(value.text);
    }
  }
  return label;
}

void connect(GroundedGraph& graph, int entity, int relation,
             const std::string& role) {
  int edge = static_cast<int>(graph.edges.size());
  graph.edges.push_back({entity, relation, role});
  graph.adjacency[entity].push_back({relation, edge});
  graph.adjacency[relation].push_back({entity, edge});
}

}  // namespace

int add_relation_vertex(GroundedGraph& graph, const Schema& schema,
                        const PropertyKindTable& kinds, const Atom& atom,
                        bool strip_properties) {
  const Signature* sig = schema.find(atom.predicate);
  if (!sig)
    throw Error(ErrorKind::Internal,
                "add_relation_vertex on undeclared predicate '" +
                    atom.predicate + "'");
  Vertex v;
  v.signature = sig->name;
  v.is_entity = false;
  v.kernel_point = sig->is_kernel_point;
  if (strip_properties)
    v.label = sig->name;
  else
    v.label = make_label(*sig, atom, kinds, v.discrete_props, v.numeric_props);
  for (int col : sig->identifier_columns()) {
    if (static_cast<size_t>(col) < atom.args.size())
      v.ids.push_back(atom.args[col].text);
  }

  int index = static_cast<int>(graph.vertices.size());
  graph.vertices.push_back(std::move(v));
  graph.adjacency.emplace_back();
  graph.atom_vertex[atom] = index;
  ++graph.relation_count;

  // one edge per identifier column occurrence, labeled by the column role
  for (int col : sig->identifier_columns()) {
    if (static_cast<size_t>(col) >= atom.args.size()) continue;
    const std::string& id = atom.args[col].text;
    auto it = graph.entity_of_id.find(id);
    if (it == graph.entity_of_id.end())
      throw Error(ErrorKind::DanglingIdentifier,
                  "atom '" + atom.to_string() + "' references identifier '" +
                      id + "' with no entity atom");
    connect(graph, it->second, index, sig->columns[col].role);
  }
  return index;
}

GroundedGraph graphicalize(const Schema& schema, const AtomSet& atoms,
                           const PropertyKindTable& kinds) {
  GroundedGraph graph;

  // entity vertices first; identifiers map to them
  std::map<std::string, int>& entity_of_id = graph.entity_of_id;
  for (const Atom& atom : atoms) {
    const Signature* sig = schema.find(atom.predicate);
    if (!sig || !sig->is_entity()) continue;
    if (atom.args.size() != sig->columns.size())
      throw Error(ErrorKind::ArityMismatch,
                  "atom '" + atom.to_string() + "' does not match signature '" +
                      sig->name + "'");
    Vertex v;
    v.signature = sig->name;
    v.is_entity = true;
    v.kernel_point = sig->is_kernel_point;
    v.label = make_label(*sig, atom, kinds, v.discrete_props, v.numeric_props);
    int id_col = sig->identifier_columns()[0];
    v.ids.push_back(atom.args[id_col].text);

    const std::string& id = atom.args[id_col].text;
    if (entity_of_id.count(id))
      throw Error(ErrorKind::DuplicateEntity,
                  "identifier '" + id + "' introduced by more than one entity atom");
    int index = static_cast<int>(graph.vertices.size());
    entity_of_id[id] = index;
    graph.atom_vertex[atom] = index;
    graph.vertices.push_back(std::move(v));
    graph.adjacency.emplace_back();
    ++graph.entity_count;
  }

  // relationship vertices and role-labeled edges
  for (const Atom& atom : atoms) {
    const Signature* sig = schema.find(atom.predicate);
    if (!sig || sig->is_entity()) continue;
    if (atom.args.size() != sig->columns.size())
      throw Error(ErrorKind::ArityMismatch,
                  "atom '" + atom.to_string() + "' does not match signature '" +
                      sig->name + "'");
    Vertex v;
    v.signature = sig->name;
    v.is_entity = false;
    v.kernel_point = sig->is_kernel_point;
    v.label = make_label(*sig, atom, kinds, v.discrete_props, v.numeric_props);
    for (int col : sig->identifier_columns())
      v.ids.push_back(atom.args[col].text);

    int index = static_cast<int>(graph.vertices.size());
    graph.atom_vertex[atom] = index;
    graph.vertices.push_back(std::move(v));
    graph.adjacency.emplace_back();
    ++graph.relation_count;

    for (int col : sig->identifier_columns()) {
      const std::string& id = atom.args[col].text;
      auto it = entity_of_id.find(id);
      if (it == entity_of_id.end())
        throw Error(ErrorKind::DanglingIdentifier,
                    "atom '" + atom.to_string() + "' references identifier '" +
                        id + "' with no entity atom");
      connect(graph, it->second, index, sig->columns[col].role);
    }
  }
  return graph;
}

Viewpoint build_viewpoint(const GroundedGraph& graph, const AtomSet& y_atoms,
                          const Atom& case_atom) {
  int case_vertex = graph.vertex_of(case_atom);
  if (case_vertex < 0)
    throw Error(ErrorKind::CaseNotInGraph,
                "case atom '" + case_atom.to_string() +
                    "' has no vertex in the graph");

  std::vector<bool> removed(graph.vertices.size(), false);
  for (const Atom& atom : y_atoms) {
    if (atom == case_atom) continue;
    int v = graph.vertex_of(atom);
    if (v >= 0) removed[v] = true;
  }

  Viewpoint vp;
  vp.case_atom = case_atom;
  std::vector<int> remap(graph.vertices.size(), -1);
  for (size_t v = 0; v < graph.vertices.size(); ++v) {
    if (removed[v]) continue;
    remap[v] = static_cast<int>(vp.graph.vertices.size());
    vp.graph.vertices.push_back(graph.vertices[v]);
    vp.graph.adjacency.emplace_back();
    if (graph.vertices[v].is_entity)
      ++vp.graph.entity_count;
    else
      ++vp.graph.relation_count;
  }
  for (const auto& [atom, v] : graph.atom_vertex)
    if (remap[v] >= 0) vp.graph.atom_vertex[atom] = remap[v];
  for (const auto& [id, v] : graph.entity_of_id)
    if (remap[v] >= 0) vp.graph.entity_of_id[id] = remap[v];
  for (const auto& edge : graph.edges) {
    if (removed[edge.entity] || removed[edge.relation]) continue;
    int e = remap[edge.entity];
    int r = remap[edge.relation];
    int idx = static_cast<int>(vp.graph.edges.size());
    vp.graph.edges.push_back({e, r, edge.role});
    vp.graph.adjacency[e].push_back({r, idx});
    vp.graph.adjacency[r].push_back({e, idx});
  }

  vp.case_vertex = remap[case_vertex];
  for (const auto& [n, e] : vp.graph.adjacency[vp.case_vertex])
    vp.wc.push_back(n);
  std::sort(vp.wc.begin(), vp.wc.end());
  vp.wc.erase(std::unique(vp.wc.begin(), vp.wc.end()), vp.wc.end());
  return vp;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == kLabelSeparator) {
      out += ':';
      continue;
    }
    out += c;
  }
  return out;
}

}  // namespace

std::string export_dot(const GroundedGraph& graph) {
  std::string out = "graph g {\n";
  for (size_t v = 0; v < graph.vertices.size(); ++v) {
    const Vertex& vertex = graph.vertices[v];
    out += "  n" + std::to_string(v) + " [label=\"" + dot_escape(vertex.label) +
           "\", shape=" + (vertex.is_entity ? "box" : "ellipse") + "];\n";
  }
  for (const auto& edge : graph.edges) {
    out += "  n" + std::to_string(edge.entity) + " -- n" +
           std::to_string(edge.relation) + " [label=\"" +
           dot_escape(edge.role) + "\"];\n";
  }
  out += "}\n";
  return out;
}

std::string export_adjacency(const GroundedGraph& graph) {
  std::string out;
  for (const auto& edge : graph.edges) {
    out += std::to_string(edge.entity);
    out += '\t';
    out += std::to_string(edge.relation);
    out += '\t';
    out += edge.role;
    out += '\n';
  }
  return out;
}

}  // namespace relkit

#include "relkit/cases.hpp"

#include <algorithm>
#include <set>

#include "relkit/error.hpp"
#include "relkit/graph.hpp"
#include "relkit/hashing.hpp"
#include "relkit/util.hpp"

namespace relkit {

ModelTask model_task_of(const Task& task) {
  if (task.property_column < 0) return ModelTask::Binary;
  return task.numeric_property ? ModelTask::Regression : ModelTask::Multiclass;
}

namespace {

std::string case_atom_id(const std::string& interp_id, const Atom& atom,
                         const Signature& sig) {
  // property-free form: the identifiers name the case
  std::string out = interp_id;
  out += ':';
  out += atom.predicate;
  auto ids = sig.identifier_columns();
  if (!ids.empty()) {
    out += '(';
    for (size_t i = 0; i < ids.size(); ++i) {
      if (i) out += ',';
      out += atom.args[ids[i]].text;
    }
    out += ')';
  }
  return out;
}

/// All candidate identifier tuples for an m = 0 target: the Cartesian
/// product over the entity sets of its identifier columns, as observed in
/// the input atoms.
std::vector<std::vector<Constant>> candidate_tuples(const Schema& schema,
                                                    const Signature& target,
                                                    const AtomSet& x_atoms) {
  std::vector<std::vector<Constant>> columns;
  for (int col : target.identifier_columns()) {
    const Column& column = target.columns[col];
    if (column.kind != ColumnKind::EntityRef)
      throw Error(ErrorKind::UnknownTarget,
                  "target '" + target.name +
                      "' must reference declared entity sets in every "
                      "identifier column");
    const Signature* entity = schema.find(column.entity);
    std::vector<Constant> ids;
    int id_col = entity->identifier_columns()[0];
    for (const Atom& atom : x_atoms)
      if (atom.predicate == entity->name) ids.push_back(atom.args[id_col]);
    std::sort(ids.begin(), ids.end());
    columns.push_back(std::move(ids));
  }

  std::vector<std::vector<Constant>> tuples{{}};
  for (const auto& column : columns) {
    std::vector<std::vector<Constant>> next;
    next.reserve(tuples.size() * column.size());
    for (const auto& prefix : tuples) {
      for (const auto& id : column) {
        auto tuple = prefix;
        tuple.push_back(id);
        next.push_back(std::move(tuple));
      }
    }
    tuples = std::move(next);
  }
  return tuples;
}

const Signature* checked_target(const Schema& schema, const Task& task) {
  const Signature* target = schema.find(task.target);
  if (!target)
    throw Error(ErrorKind::UnknownTarget,
                "target '" + task.target + "' is not a declared signature");
  if (target->relational_arity() > 0 && target->is_entity())
    throw Error(ErrorKind::UnknownTarget,
                "entity-set signature '" + task.target +
                    "' cannot be a prediction target; declare the class as a "
                    "separate relation");
  return target;
}

}  // namespace

std::vector<Case> assemble_cases_for_partition(
    const Schema& schema, const Task& task, const std::string& interp_id,
    const AtomSet& x_atoms, const AtomSet& y_atoms,
    const PropertyKindTable& kinds, const KernelConfig& config,
    const AssembleOptions& options) {
  const Signature* target = checked_target(schema, task);
  std::vector<Case> cases;

  if (target->relational_arity() == 0) {
    GroundedGraph graph = graphicalize(schema, x_atoms, kinds);
    Case c;
    c.id = interp_id;
    c.interpretation = interp_id;
    c.phi = features(graph, config);
    if (task.property_column < 0) {
      Atom presence(task.target, {});
      c.label =
          y_atoms.count(presence) ? Label::positive() : Label::negative();
    } else {
      // the single ground atom of the zero-arity target carries the label
      const Atom* found = nullptr;
      for (const Atom& atom : y_atoms)
        if (atom.predicate == task.target) found = &atom;
      if (!found) return cases;  // unlabeled interpretation
      const Constant& value = found->args[task.property_column];
      c.label = task.numeric_property ? Label::of_number(value.value)
                                      : Label::of_category(value.text);
    }
    cases.push_back(std::move(c));
    return cases;
  }

  // entity / link tasks: one mutilated graph per case over the input atoms
  GroundedGraph base = graphicalize(schema, x_atoms, kinds);

  struct PendingCase {
    Atom atom;
    Label label;
  };
  std::vector<PendingCase> pending;

  if (task.property_column < 0) {
    AtomSet positives;
    for (const Atom& atom : y_atoms)
      if (atom.predicate == task.target) positives.insert(atom);
    for (const Atom& atom : positives)
      pending.push_back({atom, Label::positive()});

    std::vector<PendingCase> negatives;
    for (auto& tuple : candidate_tuples(schema, *target, x_atoms)) {
      if (options.candidate_filter && !options.candidate_filter(tuple))
        continue;
      Atom candidate(task.target, std::move(tuple));
      if (!positives.count(candidate))
        negatives.push_back({std::move(candidate), Label::negative()});
    }
    if (options.max_negatives_per_interpretation > 0 &&
        static_cast<int>(negatives.size()) >
            options.max_negatives_per_interpretation) {
      std::mt19937_64 rng(options.seed ^ hashing::hash_str(interp_id));
      deterministic_shuffle(negatives, rng);
      negatives.resize(options.max_negatives_per_interpretation);
      std::sort(negatives.begin(), negatives.end(),
                [](const PendingCase& a, const PendingCase& b) {
                  return a.atom < b.atom;
                });
    }
    for (auto& neg : negatives) pending.push_back(std::move(neg));
  } else {
    for (const Atom& atom : y_atoms) {
      if (atom.predicate != task.target) continue;
      const Constant& value = atom.args[task.property_column];
      pending.push_back({atom, task.numeric_property
                                   ? Label::of_number(value.value)
                                   : Label::of_category(value.text)});
    }
  }

  std::vector<Case> slot(pending.size());
  parallel_for(pending.size(), options.jobs, [&](size_t i) {
    GroundedGraph graph = base;
    int vertex = add_relation_vertex(graph, schema, kinds, pending[i].atom,
                                     /*strip_properties=*/true);
    std::vector<int> wc;
    for (const auto& [neighbor, edge] : graph.adjacency[vertex])
      wc.push_back(neighbor);
    std::sort(wc.begin(), wc.end());
    wc.erase(std::unique(wc.begin(), wc.end()), wc.end());

    Case c;
    c.id = case_atom_id(interp_id, pending[i].atom, *target);
    c.interpretation = interp_id;
    c.phi = features_for_case(graph, wc, config);
    c.label = pending[i].label;
    slot[i] = std::move(c);
  });
  for (auto& c : slot) cases.push_back(std::move(c));
  return cases;
}

std::vector<Case> assemble_cases(const Schema& schema, const Job& job,
                                 const Task& task,
                                 const std::vector<Interpretation>& interps,
                                 const PropertyKindTable& kinds,
                                 const KernelConfig& config,
                                 const AssembleOptions& options) {
  checked_target(schema, task);
  if (std::find(job.targets.begin(), job.targets.end(), task.target) ==
      job.targets.end())
    throw Error(ErrorKind::UnknownTarget,
                "task target '" + task.target + "' is not part of the job");

  std::vector<Case> cases;
  for (const auto& interp : interps) {
    Partition partition = infer_partition(schema, job, interp);
    auto batch = assemble_cases_for_partition(schema, task, interp.id,
                                              partition.x, partition.y, kinds,
                                              config, options);
    for (auto& c : batch) cases.push_back(std::move(c));
  }

  if (cases.empty())
    throw Error(ErrorKind::NoCases,
                "no cases for target '" + task.target + "'");
  return cases;
}

}  // namespace relkit

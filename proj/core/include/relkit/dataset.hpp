#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relkit/atom.hpp"
#include "relkit/schema.hpp"

namespace relkit {

/// One logical world: a finite set of ground atoms under the closed-world
/// assumption.
struct Interpretation {
  std::string id;
  AtomSet atoms;
};

enum class PropertyKind { Numeric, Categorical };

/// Inferred kind per (signature, property column index). Columns never seen
/// in the data default to Categorical.
class PropertyKindTable {
 public:
  PropertyKind kind(const std::string& signature, int column) const {
    auto it = kinds_.find({signature, column});
    return it == kinds_.end() ? PropertyKind::Categorical : it->second;
  }
  void set(const std::string& signature, int column, PropertyKind kind) {
    kinds_[{signature, column}] = kind;
  }

 private:
  std::map<std::pair<std::string, int>, PropertyKind> kinds_;
};

/// Scans every interpretation; a property column is Numeric only when all of
/// its observed values parse as decimal numbers. A column with both numeric
/// and symbolic values raises MixedPropertyKind.
PropertyKindTable infer_property_kinds(
    const Schema& schema, const std::vector<Interpretation>& interps);

/// Parses a fact file: `interpretation <id>.` opens a block, the following
/// ground atoms `pred(c1,...,cn).` belong to it, `%` comments allowed.
std::vector<Interpretation> parse_interpretations(std::string_view text,
                                                  const Schema& schema);

/// parse_interpretations over the contents of `path`, plus the dataset-wide
/// validation pass (arity checks, property-kind inference).
std::vector<Interpretation> load_interpretations(const std::string& path,
                                                 const Schema& schema);

struct Job {
  std::vector<std::string> targets;
};

enum class TaskKind {
  BinaryInterpretation,      // n = 0, m = 0
  MulticlassInterpretation,  // n = 0, m = 1, categorical
  RegressionInterpretation,  // n = 0, m = 1, numeric
  BinaryEntity,              // n = 1, m = 0
  MulticlassEntity,          // n = 1, m = 1, categorical
  RegressionEntity,          // n = 1, m = 1, numeric
  LinkPrediction,            // n >= 2, m = 0
  AttributedLink,            // n >= 2, m = 1
};

const char* task_kind_name(TaskKind kind);

/// One independently trainable prediction problem. Multitask jobs (several
/// targets, or a target with several properties) expand into one Task per
/// (target, property column).
struct Task {
  std::string target;
  int property_column = -1;  // -1 for m = 0 tasks
  TaskKind kind = TaskKind::BinaryInterpretation;
  bool numeric_property = false;
};

std::vector<Task> expand_job(const Schema& schema,
                             const PropertyKindTable& kinds, const Job& job);

/// Splits an interpretation into input atoms x and output atoms y. y holds
/// the atoms of every target plus the atoms of every intensional relation
/// that transitively depends on a target through the rule bodies.
struct Partition {
  AtomSet x;
  AtomSet y;
};
Partition infer_partition(const Schema& schema, const Job& job,
                          const Interpretation& interp);

/// Predicates whose atoms belong to y for this job (targets plus dependent
/// intensional relations).
std::vector<std::string> output_predicates(const Schema& schema,
                                           const Job& job);

/// A totally ordered partition of one interpretation's atoms.
struct SliceSystem {
  std::vector<Constant> keys;          // sorted, unique
  std::map<Atom, size_t> assignment;   // atom -> index into keys

  AtomSet atoms_of(size_t slice) const;
  AtomSet atoms_up_to(size_t slice, bool inclusive) const;
};

/// Slices an interpretation by the value of `column` of `relation` (an
/// E-relation property). Entities of other sets and relationship atoms
/// inherit the smallest key among the keyed entities they touch, propagated
/// to a fixpoint; atoms disconnected from every keyed entity fall into the
/// first slice.
SliceSystem build_slices(const Schema& schema, const Interpretation& interp,
                         const std::string& relation,
                         const std::string& column);

}  // namespace relkit

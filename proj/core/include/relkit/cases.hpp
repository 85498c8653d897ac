#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "relkit/dataset.hpp"
#include "relkit/kernel.hpp"
#include "relkit/learner.hpp"

namespace relkit {

struct Case {
  std::string id;           // "<interpretation>" or "<interpretation>:<atom>"
  std::string interpretation;
  SparseFeatureVector phi;
  Label label;
};

struct AssembleOptions {
  /// Upper bound on generated negative cases per interpretation for m = 0
  /// entity/link tasks; 0 means the full closed-world enumeration.
  int max_negatives_per_interpretation = 0;
  std::uint64_t seed = 1;  // negative subsampling
  int jobs = 1;            // featurization parallelism
  /// Restricts candidate identifier tuples for negative generation (used by
  /// slice-forward evaluation); null admits every tuple.
  std::function<bool(const std::vector<Constant>&)> candidate_filter;
};

ModelTask model_task_of(const Task& task);

/// Turns interpretations (with intensional atoms already derived) into
/// labeled feature vectors. Interpretation-level tasks produce one instance
/// per interpretation over the input graph; entity and link tasks produce one
/// instance per case over the mutilated graph, with negatives enumerated
/// closed-world from the declared entity sets.
std::vector<Case> assemble_cases(const Schema& schema, const Job& job,
                                 const Task& task,
                                 const std::vector<Interpretation>& interps,
                                 const PropertyKindTable& kinds,
                                 const KernelConfig& config,
                                 const AssembleOptions& options = {});

/// Case assembly for one interpretation with an explicit input/output split;
/// slice-forward evaluation calls this with per-episode visibility.
std::vector<Case> assemble_cases_for_partition(
    const Schema& schema, const Task& task, const std::string& interp_id,
    const AtomSet& x_atoms, const AtomSet& y_atoms,
    const PropertyKindTable& kinds, const KernelConfig& config,
    const AssembleOptions& options = {});

}  // namespace relkit

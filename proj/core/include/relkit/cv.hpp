#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relkit/cases.hpp"
#include "relkit/dataset.hpp"
#include "relkit/kernel.hpp"
#include "relkit/learner.hpp"
#include "relkit/metrics.hpp"

namespace relkit {

struct FoldPlan {
  enum class Mode { KFold, LeaveOneOut, SliceForward };
  Mode mode = Mode::KFold;
  int k = 10;
  std::uint64_t shuffle_seed = 1;
  // slice-forward: key relation/column plus the training frame width (the
  // number of immediately preceding slices used for training)
  std::string slice_relation;
  std::string slice_column;
  int frame = 2;
};

/// Fold assignment over interpretation ids: k-fold deals shuffled ids
/// round-robin; leave-one-out holds out each id in turn. Every id lands in
/// exactly one test fold.
std::vector<std::vector<std::string>> make_folds(
    const std::vector<std::string>& ids, const FoldPlan& plan);

struct MetricSeries {
  std::string name;
  std::vector<std::pair<std::string, double>> per_fold;  // (fold, value)

  double mean() const;
  double stddev() const;
};

struct Report {
  std::vector<std::string> folds;
  std::vector<MetricSeries> metrics;
  std::string contingency;  // multiclass only

  const MetricSeries* find(const std::string& name) const;
  std::string to_text() const;
  /// Line-oriented: `fold <name> <metric> <value>` then
  /// `aggregate <metric> mean <m> std <s>`.
  std::string to_machine() const;
};

/// Trains and evaluates per fold. Interpretations must already carry their
/// derived intensional atoms.
Report run_cv(const Schema& schema, const Job& job, const Task& task,
              const std::vector<Interpretation>& interps,
              const PropertyKindTable& kinds, const KernelConfig& kernel_config,
              const TrainConfig& train_config, LossKind loss,
              const FoldPlan& plan, const AssembleOptions& options = {});

}  // namespace relkit

#include "relkit/cv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>

#include "relkit/atom.hpp"
#include "relkit/error.hpp"
#include "relkit/util.hpp"

namespace relkit {

double MetricSeries::mean() const {
  if (per_fold.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [fold, value] : per_fold) sum += value;
  return sum / static_cast<double>(per_fold.size());
}

double MetricSeries::stddev() const {
  if (per_fold.size() < 2) return 0.0;
  double m = mean();
  double sum = 0.0;
  for (const auto& [fold, value] : per_fold) sum += (value - m) * (value - m);
  return std::sqrt(sum / static_cast<double>(per_fold.size()));
}

const MetricSeries* Report::find(const std::string& name) const {
  for (const auto& series : metrics)
    if (series.name == name) return &series;
  return nullptr;
}

std::string Report::to_text() const {
  std::string out;
  for (const auto& series : metrics) {
    out += series.name;
    out += ": mean ";
    out += format_number(series.mean());
    out += " std ";
    out += format_number(series.stddev());
    out += " over ";
    out += std::to_string(series.per_fold.size());
    out += " folds\n";
    for (const auto& [fold, value] : series.per_fold) {
      out += "  ";
      out += fold;
      out += ": ";
      out += format_number(value);
      out += '\n';
    }
  }
  if (!contingency.empty()) {
    out += "contingency:\n";
    out += contingency;
  }
  return out;
}

std::string Report::to_machine() const {
  std::string out;
  for (const auto& series : metrics)
    for (const auto& [fold, value] : series.per_fold)
      out += "fold " + fold + " " + series.name + " " + format_number(value) +
             "\n";
  for (const auto& series : metrics)
    out += "aggregate " + series.name + " mean " +
           format_number(series.mean()) + " std " +
           format_number(series.stddev()) + "\n";
  return out;
}

std::vector<std::vector<std::string>> make_folds(
    const std::vector<std::string>& ids, const FoldPlan& plan) {
  if (plan.mode == FoldPlan::Mode::LeaveOneOut) {
    std::vector<std::vector<std::string>> folds;
    for (const auto& id : ids) folds.push_back({id});
    return folds;
  }
  if (plan.mode != FoldPlan::Mode::KFold)
    throw Error(ErrorKind::UsageError,
                "make_folds handles k-fold and leave-one-out plans");
  if (plan.k < 2)
    throw Error(ErrorKind::UsageError, "k-fold needs at least 2 folds");
  std::vector<std::string> shuffled = ids;
  std::mt19937_64 rng(plan.shuffle_seed);
  deterministic_shuffle(shuffled, rng);
  size_t k = std::min<size_t>(static_cast<size_t>(plan.k), shuffled.size());
  std::vector<std::vector<std::string>> folds(k);
  for (size_t i = 0; i < shuffled.size(); ++i)
    folds[i % k].push_back(shuffled[i]);
  return folds;
}

namespace {

struct FoldOutcome {
  std::vector<Scored> scored;                       // binary / regression
  std::vector<std::pair<std::string, std::string>> classified;  // multiclass
};

void append_metrics(Report& report, const std::string& fold,
                    const FoldOutcome& outcome, ModelTask task,
                    ContingencyTable& contingency) {
  auto push = [&](const char* name, double value) {
    for (auto& series : report.metrics) {
      if (series.name == name) {
        series.per_fold.emplace_back(fold, value);
        return;
      }
    }
    MetricSeries series;
    series.name = name;
    series.per_fold.emplace_back(fold, value);
    report.metrics.push_back(std::move(series));
  };

  switch (task) {
    case ModelTask::Binary: {
      bool has_pos = false, has_neg = false;
      for (const auto& s : outcome.scored)
        (s.label > 0 ? has_pos : has_neg) = true;
      if (has_pos && has_neg) {
        push("auroc", evaluate(outcome.scored, Metric::Auroc));
        push("aurpc", evaluate(outcome.scored, Metric::Aurpc));
      }
      push("accuracy", evaluate(outcome.scored, Metric::Accuracy));
      push("precision", evaluate(outcome.scored, Metric::Precision));
      push("recall", evaluate(outcome.scored, Metric::Recall));
      push("f1", evaluate(outcome.scored, Metric::F1));
      break;
    }
    case ModelTask::Multiclass: {
      size_t correct = 0;
      for (const auto& [truth, predicted] : outcome.classified) {
        contingency.add(truth, predicted);
        if (truth == predicted) ++correct;
      }
      push("accuracy", outcome.classified.empty()
                           ? 0.0
                           : static_cast<double>(correct) /
                                 static_cast<double>(outcome.classified.size()));
      break;
    }
    case ModelTask::Regression:
      push("rmse", evaluate(outcome.scored, Metric::Rmse));
      push("scc", evaluate(outcome.scored, Metric::Scc));
      push("mape", evaluate(outcome.scored, Metric::Mape));
      break;
  }
}

FoldOutcome score_cases(const LinearModel& model,
                        const std::vector<const Case*>& test, ModelTask task) {
  FoldOutcome outcome;
  for (const Case* c : test) {
    ModelPrediction prediction = predict(model, c->phi);
    if (task == ModelTask::Multiclass)
      outcome.classified.emplace_back(c->label.category,
                                      prediction.label.category);
    else
      outcome.scored.push_back({prediction.score, c->label.number});
  }
  return outcome;
}

Report run_interpretation_folds(const Schema& schema, const Job& job,
                                const Task& task,
                                const std::vector<Interpretation>& interps,
                                const PropertyKindTable& kinds,
                                const KernelConfig& kernel_config,
                                const TrainConfig& train_config, LossKind loss,
                                const FoldPlan& plan,
                                const AssembleOptions& options) {
  std::vector<Case> cases =
      assemble_cases(schema, job, task, interps, kinds, kernel_config, options);

  std::vector<std::string> ids;
  for (const auto& interp : interps) ids.push_back(interp.id);
  auto folds = make_folds(ids, plan);

  ModelTask model_task = model_task_of(task);

  // folds run in parallel; the report is assembled at a single point below
  struct FoldResult {
    bool evaluated = false;
    std::string name;
    FoldOutcome outcome;
  };
  std::vector<FoldResult> results(folds.size());
  parallel_for(folds.size(), options.jobs, [&](size_t f) {
    std::set<std::string> held_out(folds[f].begin(), folds[f].end());
    std::vector<Instance> train_set;
    std::vector<const Case*> test_set;
    for (const auto& c : cases) {
      if (held_out.count(c.interpretation))
        test_set.push_back(&c);
      else
        train_set.push_back({c.phi, c.label});
    }
    if (train_set.empty() || test_set.empty()) return;
    LinearModel model =
        train(train_set, train_config, model_task, loss, kernel_config);
    results[f].evaluated = true;
    results[f].name = plan.mode == FoldPlan::Mode::LeaveOneOut
                          ? folds[f].front()
                          : "fold" + std::to_string(f + 1);
    results[f].outcome = score_cases(model, test_set, model_task);
  });

  Report report;
  ContingencyTable contingency;
  for (const auto& result : results) {
    if (!result.evaluated) continue;
    report.folds.push_back(result.name);
    append_metrics(report, result.name, result.outcome, model_task,
                   contingency);
  }
  if (model_task == ModelTask::Multiclass && contingency.total() > 0)
    report.contingency = contingency.to_text();
  if (report.folds.empty())
    throw Error(ErrorKind::NoCases, "no evaluable folds");
  return report;
}

Report run_slice_forward(const Schema& schema, const Job& job,
                         const Task& task,
                         const std::vector<Interpretation>& interps,
                         const PropertyKindTable& kinds,
                         const KernelConfig& kernel_config,
                         const TrainConfig& train_config, LossKind loss,
                         const FoldPlan& plan,
                         const AssembleOptions& options) {
  if (plan.frame < 1)
    throw Error(ErrorKind::UsageError,
                "slice-forward frame must be at least 1");
  auto output_preds = output_predicates(schema, job);
  std::set<std::string> y_preds(output_preds.begin(), output_preds.end());

  ModelTask model_task = model_task_of(task);
  Report report;
  ContingencyTable contingency;

  for (const auto& interp : interps) {
    SliceSystem slices =
        build_slices(schema, interp, plan.slice_relation, plan.slice_column);

    // visible inputs at slice t: {x(i) : i <= t} plus {y(i) : i < t}
    auto inputs_at = [&](size_t t) {
      AtomSet atoms;
      for (const auto& [atom, idx] : slices.assignment) {
        bool is_output = y_preds.count(atom.predicate) > 0;
        if ((is_output && idx < t) || (!is_output && idx <= t))
          atoms.insert(atom);
      }
      return atoms;
    };
    auto outputs_at = [&](size_t t) {
      AtomSet atoms;
      for (const auto& [atom, idx] : slices.assignment)
        if (idx == t && y_preds.count(atom.predicate)) atoms.insert(atom);
      return atoms;
    };
    // negatives for slice t are candidate tuples whose entities first
    // appear no later than t, with the smallest entity key exactly t
    auto entity_key = [&](const Constant& id) {
      size_t best = SIZE_MAX;
      for (const auto& [atom, idx] : slices.assignment) {
        const Signature* sig = schema.find(atom.predicate);
        if (!sig || !sig->is_entity()) continue;
        if (atom.args[sig->identifier_columns()[0]] == id)
          best = std::min(best, idx);
      }
      return best;
    };
    auto cases_at = [&](size_t t) {
      AssembleOptions slice_options = options;
      slice_options.candidate_filter =
          [&, t](const std::vector<Constant>& tuple) {
            size_t smallest = SIZE_MAX;
            for (const auto& id : tuple)
              smallest = std::min(smallest, entity_key(id));
            return smallest == t;
          };
      std::string episode_id = interp.id + "@" + slices.keys[t].text;
      return assemble_cases_for_partition(schema, task, episode_id,
                                          inputs_at(t), outputs_at(t), kinds,
                                          kernel_config, slice_options);
    };

    for (size_t t = static_cast<size_t>(plan.frame); t < slices.keys.size();
         ++t) {
      std::vector<Instance> train_set;
      for (size_t back = 1; back <= static_cast<size_t>(plan.frame); ++back)
        for (const auto& c : cases_at(t - back))
          train_set.push_back({c.phi, c.label});
      auto test_cases = cases_at(t);
      std::vector<const Case*> test_set;
      for (const auto& c : test_cases) test_set.push_back(&c);
      if (train_set.empty() || test_set.empty()) continue;

      LinearModel model =
          train(train_set, train_config, model_task, loss, kernel_config);
      std::string fold_name = interp.id + "@" + slices.keys[t].text;
      report.folds.push_back(fold_name);
      append_metrics(report, fold_name,
                     score_cases(model, test_set, model_task), model_task,
                     contingency);
    }
  }
  if (model_task == ModelTask::Multiclass && contingency.total() > 0)
    report.contingency = contingency.to_text();
  if (report.folds.empty())
    throw Error(ErrorKind::NoCases, "no evaluable slice episodes");
  return report;
}

}  // namespace

Report run_cv(const Schema& schema, const Job& job, const Task& task,
              const std::vector<Interpretation>& interps,
              const PropertyKindTable& kinds, const KernelConfig& kernel_config,
              const TrainConfig& train_config, LossKind loss,
              const FoldPlan& plan, const AssembleOptions& options) {
  if (plan.mode == FoldPlan::Mode::SliceForward)
    return run_slice_forward(schema, job, task, interps, kinds, kernel_config,
                             train_config, loss, plan, options);
  return run_interpretation_folds(schema, job, task, interps, kinds,
                                  kernel_config, train_config, loss, plan,
                                  options);
}

}  // namespace relkit

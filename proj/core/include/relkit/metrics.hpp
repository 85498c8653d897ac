#pragma once

#include <map>
#include <string>
#include <vector>

namespace relkit {

enum class Metric { Auroc, Aurpc, Accuracy, Precision, Recall, F1, Rmse, Scc, Mape };

const char* metric_name(Metric metric);

/// One scored example. Classification and ranking metrics read label as +-1
/// and threshold / rank by score; regression metrics read score as the
/// prediction and label as the target.
struct Scored {
  double score = 0.0;
  double label = 0.0;
};

/// AUROC uses the rank statistic with average ranks over ties; AURPC is the
/// step-wise precision-recall integration from the highest score down; MAPE
/// is reported in percent. Single-class inputs raise DegenerateLabels for
/// AUROC/AURPC.
double evaluate(const std::vector<Scored>& scored, Metric metric);

/// Multiclass contingency counts with accuracy, per-class precision/recall/
/// F1, and micro-averages.
class ContingencyTable {
 public:
  void add(const std::string& truth, const std::string& predicted);

  double accuracy() const;
  double micro_precision() const;
  double micro_recall() const;
  double micro_f1() const;
  std::size_t total() const { return total_; }

  std::string to_text() const;

 private:
  std::vector<std::string> classes_;  // first-appearance order
  std::map<std::pair<std::string, std::string>, std::size_t> counts_;
  std::size_t total_ = 0;

  std::size_t count(const std::string& truth, const std::string& predicted) const;
};

}  // namespace relkit

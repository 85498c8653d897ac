#include "relkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "relkit/error.hpp"

namespace relkit {

const char* metric_name(Metric metric) {
  switch (metric) {
    case Metric::Auroc: return "auroc";
    case Metric::Aurpc: return "aurpc";
    case Metric::Accuracy: return "accuracy";
    case Metric::Precision: return "precision";
    case Metric::Recall: return "recall";
    case Metric::F1: return "f1";
    case Metric::Rmse: return "rmse";
    case Metric::Scc: return "scc";
    case Metric::Mape: return "mape";
  }
  return "?";
}

namespace {

void require_two_classes(const std::vector<Scored>& scored, size_t positives) {
  if (positives == 0 || positives == scored.size())
    throw Error(ErrorKind::DegenerateLabels,
                "ranking metrics need both classes present");
}

double auroc(const std::vector<Scored>& scored) {
  size_t positives = 0;
  for (const auto& s : scored)
    if (s.label > 0) ++positives;
  require_two_classes(scored, positives);
  size_t negatives = scored.size() - positives;

  std::vector<size_t> order(scored.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return scored[a].score < scored[b].score;
  });

  // average ranks over tie groups
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() &&
           scored[order[j]].score == scored[order[i]].score)
      ++j;
    double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k)
      if (scored[order[k]].label > 0) rank_sum_pos += avg_rank;
    i = j;
  }
  double u = rank_sum_pos -
             static_cast<double>(positives) * (positives + 1) / 2.0;
  return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

double aurpc(const std::vector<Scored>& scored) {
  size_t positives = 0;
  for (const auto& s : scored)
    if (s.label > 0) ++positives;
  require_two_classes(scored, positives);

  std::vector<size_t> order(scored.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return scored[a].score > scored[b].score;
  });

  // step-wise integration from the highest score down, tie groups together
  double area = 0.0;
  double prev_recall = 0.0;
  size_t tp = 0, fp = 0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() &&
           scored[order[j]].score == scored[order[i]].score)
      ++j;
    for (size_t k = i; k < j; ++k) {
      if (scored[order[k]].label > 0) ++tp;
      else ++fp;
    }
    double recall = static_cast<double>(tp) / static_cast<double>(positives);
    double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return area;
}

struct BinaryCounts {
  size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

BinaryCounts binary_counts(const std::vector<Scored>& scored) {
  BinaryCounts c;
  for (const auto& s : scored) {
    bool predicted = s.score >= 0.0;
    bool truth = s.label > 0;
    if (predicted && truth) ++c.tp;
    else if (predicted && !truth) ++c.fp;
    else if (!predicted && truth) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double rmse(const std::vector<Scored>& scored) {
  double sum = 0.0;
  for (const auto& s : scored) {
    double err = s.score - s.label;
    sum += err * err;
  }
  return std::sqrt(sum / static_cast<double>(scored.size()));
}

double scc(const std::vector<Scored>& scored) {
  double mean_p = 0.0, mean_t = 0.0;
  for (const auto& s : scored) {
    mean_p += s.score;
    mean_t += s.label;
  }
  mean_p /= static_cast<double>(scored.size());
  mean_t /= static_cast<double>(scored.size());
  double cov = 0.0, var_p = 0.0, var_t = 0.0;
  for (const auto& s : scored) {
    double dp = s.score - mean_p;
    double dt = s.label - mean_t;
    cov += dp * dt;
    var_p += dp * dp;
    var_t += dt * dt;
  }
  if (var_p == 0.0 || var_t == 0.0) {
    // constant on one side: perfect when predictions equal targets
    for (const auto& s : scored)
      if (s.score != s.label) return 0.0;
    return 1.0;
  }
  double r = cov / std::sqrt(var_p * var_t);
  return r * r;
}

double mape(const std::vector<Scored>& scored) {
  double sum = 0.0;
  size_t n = 0;
  for (const auto& s : scored) {
    if (std::fabs(s.label) < 1e-12) continue;  // zero targets excluded
    sum += std::fabs(s.score - s.label) / std::fabs(s.label);
    ++n;
  }
  return n == 0 ? 0.0 : 100.0 * sum / static_cast<double>(n);
}

}  // namespace

double evaluate(const std::vector<Scored>& scored, Metric metric) {
  if (scored.empty())
    throw Error(ErrorKind::DegenerateLabels, "no scored examples");
  switch (metric) {
    case Metric::Auroc: return auroc(scored);
    case Metric::Aurpc: return aurpc(scored);
    case Metric::Accuracy: {
      auto c = binary_counts(scored);
      return static_cast<double>(c.tp + c.tn) /
             static_cast<double>(scored.size());
    }
    case Metric::Precision: {
      auto c = binary_counts(scored);
      return c.tp + c.fp == 0
                 ? 0.0
                 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    }
    case Metric::Recall: {
      auto c = binary_counts(scored);
      return c.tp + c.fn == 0
                 ? 0.0
                 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    }
    case Metric::F1: {
      auto c = binary_counts(scored);
      double denom = 2.0 * c.tp + c.fp + c.fn;
      return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / denom;
    }
    case Metric::Rmse: return rmse(scored);
    case Metric::Scc: return scc(scored);
    case Metric::Mape: return mape(scored);
  }
  return 0.0;
}

void ContingencyTable::add(const std::string& truth,
                           const std::string& predicted) {
  if (std::find(classes_.begin(), classes_.end(), truth) == classes_.end())
    classes_.push_back(truth);
  if (std::find(classes_.begin(), classes_.end(), predicted) == classes_.end())
    classes_.push_back(predicted);
  ++counts_[{truth, predicted}];
  ++total_;
}

std::size_t ContingencyTable::count(const std::string& truth,
                                    const std::string& predicted) const {
  auto it = counts_.find({truth, predicted});
  return it == counts_.end() ? 0 : it->second;
}

double ContingencyTable::accuracy() const {
  if (total_ == 0) return 0.0;
  std::size_t correct = 0;
  for (const auto& cls : classes_) correct += count(cls, cls);
  return static_cast<double>(correct) / static_cast<double>(total_);
}

// single-label multiclass: micro-averaged P, R, and F1 all reduce to the
// fraction of correct predictions
double ContingencyTable::micro_precision() const { return accuracy(); }
double ContingencyTable::micro_recall() const { return accuracy(); }
double ContingencyTable::micro_f1() const { return accuracy(); }

std::string ContingencyTable::to_text() const {
  std::string out = "truth\\predicted";
  for (const auto& cls : classes_) out += "\t" + cls;
  out += "\tP\tR\tF1\n";
  char buf[64];
  for (const auto& truth : classes_) {
    out += truth;
    std::size_t row_total = 0;
    for (const auto& predicted : classes_) {
      std::size_t n = count(truth, predicted);
      row_total += n;
      out += "\t" + std::to_string(n);
    }
    std::size_t col_total = 0;
    for (const auto& t : classes_) col_total += count(t, truth);
    double tp = static_cast<double>(count(truth, truth));
    double precision = col_total == 0 ? 0.0 : tp / static_cast<double>(col_total);
    double recall = row_total == 0 ? 0.0 : tp / static_cast<double>(row_total);
    double f1 = precision + recall == 0.0
                    ? 0.0
                    : 2.0 * precision * recall / (precision + recall);
    std::snprintf(buf, sizeof(buf), "\t%.4f\t%.4f\t%.4f\n", precision, recall,
                  f1);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "micro-average\taccuracy %.4f\n", accuracy());
  out += buf;
  return out;
}

}  // namespace relkit

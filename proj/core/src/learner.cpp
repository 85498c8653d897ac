#include "relkit/learner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "relkit/atom.hpp"
#include "relkit/error.hpp"
#include "relkit/util.hpp"

namespace relkit {

const char* model_task_name(ModelTask task) {
  switch (task) {
    case ModelTask::Binary: return "binary";
    case ModelTask::Multiclass: return "multiclass";
    case ModelTask::Regression: return "regression";
  }
  return "?";
}

const char* loss_kind_name(LossKind loss) {
  switch (loss) {
    case LossKind::Hinge: return "hinge";
    case LossKind::Logistic: return "logistic";
    case LossKind::Squared: return "squared";
  }
  return "?";
}

LossKind parse_loss_kind(const std::string& name) {
  if (name == "hinge") return LossKind::Hinge;
  if (name == "logistic") return LossKind::Logistic;
  if (name == "squared") return LossKind::Squared;
  throw Error(ErrorKind::UsageError, "unknown loss '" + name + "'");
}

void TrainConfig::validate() const {
  if (eta0 <= 0.0)
    throw Error(ErrorKind::UsageError, "learning rate must be positive");
  if (lambda < 0.0)
    throw Error(ErrorKind::UsageError, "lambda must be nonnegative");
  if (epochs < 1)
    throw Error(ErrorKind::UsageError, "epochs must be at least 1");
  if (decay < 0.0)
    throw Error(ErrorKind::UsageError, "decay must be nonnegative");
}

namespace {

/// Weight vector with a multiplicative scale so L2 shrinkage is O(1).
class ScaledWeights {
 public:
  void shrink(double factor) {
    if (factor < 1e-12) factor = 1e-12;
    scale_ *= factor;
    if (scale_ < 1e-9) fold();
  }

  void add(const SparseFeatureVector& phi, double factor) {
    for (const auto& [index, value] : phi.entries())
      weights_.add(index, factor * value / scale_);
  }

  double dot(const SparseFeatureVector& phi) const {
    return scale_ * weights_.dot(phi);
  }

  SparseFeatureVector materialize() {
    fold();
    return weights_;
  }

 private:
  void fold() {
    weights_.scale(scale_);
    scale_ = 1.0;
  }

  SparseFeatureVector weights_;
  double scale_ = 1.0;
};

/// One pass of binary SGD over +-1 labels.
std::pair<SparseFeatureVector, double> sgd_binary(
    const std::vector<const SparseFeatureVector*>& phis,
    const std::vector<double>& ys, const TrainConfig& config, LossKind loss) {
  ScaledWeights w;
  double bias = 0.0;
  std::mt19937_64 rng(config.seed);
  std::vector<size_t> order(phis.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::uint64_t t = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    deterministic_shuffle(order, rng);
    for (size_t i : order) {
      double eta = config.eta0 / (1.0 + config.decay * static_cast<double>(t));
      ++t;
      const SparseFeatureVector& phi = *phis[i];
      double y = ys[i];
      double score = w.dot(phi) + bias;
      if (config.lambda > 0.0) w.shrink(1.0 - eta * config.lambda);
      switch (loss) {
        case LossKind::Hinge:
          if (y * score < 1.0) {
            w.add(phi, eta * y);
            bias += eta * y;
          }
          break;
        case LossKind::Logistic: {
          double p = 1.0 / (1.0 + std::exp(y * score));  // sigma(-y * score)
          w.add(phi, eta * y * p);
          bias += eta * y * p;
          break;
        }
        case LossKind::Squared: {
          double err = score - y;
          w.add(phi, -eta * err);
          bias -= eta * err;
          break;
        }
      }
    }
  }
  return {w.materialize(), bias};
}

}  // namespace

LinearModel train(const std::vector<Instance>& instances,
                  const TrainConfig& config, ModelTask task, LossKind loss,
                  const KernelConfig& kernel_snapshot) {
  config.validate();
  if (instances.empty())
    throw Error(ErrorKind::EmptyTrainingSet, "no training instances");

  LinearModel model;
  model.task = task;
  model.loss = loss;
  model.kernel = kernel_snapshot;
  model.train = config;

  std::vector<const SparseFeatureVector*> phis;
  phis.reserve(instances.size());
  for (const auto& inst : instances) phis.push_back(&inst.phi);

  switch (task) {
    case ModelTask::Binary: {
      std::vector<double> ys;
      ys.reserve(instances.size());
      for (const auto& inst : instances) {
        if (inst.label.number != 1.0 && inst.label.number != -1.0)
          throw Error(ErrorKind::LabelTaskMismatch,
                      "binary training label must be +1 or -1");
        ys.push_back(inst.label.number);
      }
      auto [w, b] = sgd_binary(phis, ys, config, loss);
      model.weights.push_back(std::move(w));
      model.bias.push_back(b);
      break;
    }
    case ModelTask::Regression: {
      if (loss != LossKind::Squared)
        throw Error(ErrorKind::LabelTaskMismatch,
                    "regression requires the squared loss");
      std::vector<double> ys;
      ys.reserve(instances.size());
      for (const auto& inst : instances) ys.push_back(inst.label.number);
      auto [w, b] = sgd_binary(phis, ys, config, loss);
      model.weights.push_back(std::move(w));
      model.bias.push_back(b);
      break;
    }
    case ModelTask::Multiclass: {
      // declared class order: first appearance in the training data
      std::set<std::string> seen;
      for (const auto& inst : instances) {
        if (inst.label.category.empty())
          throw Error(ErrorKind::LabelTaskMismatch,
                      "multiclass training label must be a category");
        if (seen.insert(inst.label.category).second)
          model.classes.push_back(inst.label.category);
      }
      for (const auto& cls : model.classes) {
        std::vector<double> ys;
        ys.reserve(instances.size());
        for (const auto& inst : instances)
          ys.push_back(inst.label.category == cls ? 1.0 : -1.0);
        auto [w, b] = sgd_binary(phis, ys, config, loss);
        model.weights.push_back(std::move(w));
        model.bias.push_back(b);
      }
      break;
    }
  }
  return model;
}

ModelPrediction predict(const LinearModel& model,
                        const SparseFeatureVector& phi) {
  ModelPrediction out;
  switch (model.task) {
    case ModelTask::Binary: {
      double score = model.weights[0].dot(phi) + model.bias[0];
      out.score = score;
      out.label = score >= 0.0 ? Label::positive() : Label::negative();
      return out;
    }
    case ModelTask::Regression: {
      double score = model.weights[0].dot(phi) + model.bias[0];
      out.score = score;
      out.label = Label::of_number(score);
      return out;
    }
    case ModelTask::Multiclass: {
      // argmax over per-class scores; ties break to the earliest class
      size_t best = 0;
      double best_score = 0.0;
      for (size_t c = 0; c < model.classes.size(); ++c) {
        double score = model.weights[c].dot(phi) + model.bias[c];
        if (c == 0 || score > best_score) {
          best = c;
          best_score = score;
        }
      }
      out.score = best_score;
      out.label = Label::of_category(model.classes[best]);
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// model file: versioned text header + sparse weight lines

namespace {
constexpr const char* kModelMagic = "relkit-model";
constexpr int kModelVersion = 1;
}  // namespace

void LinearModel::save(std::ostream& out) const {
  out << kModelMagic << " v" << kModelVersion << "\n";
  out << "task " << model_task_name(task) << "\n";
  out << "loss " << loss_kind_name(loss) << "\n";
  out << "kernel radius " << kernel.max_radius << " distance "
      << kernel.max_distance << " match " << match_kind_name(kernel.match)
      << " tuples " << tuple_mode_name(kernel.tuple_mode) << " kernel_points "
      << (kernel.use_kernel_points ? 1 : 0) << " hash_bits "
      << kernel.hash_bits << "\n";
  out << "train eta0 " << format_number(train.eta0) << " decay "
      << format_number(train.decay) << " epochs " << train.epochs
      << " lambda " << format_number(train.lambda) << " seed " << train.seed
      << "\n";
  out << "target " << (target_signature.empty() ? "-" : target_signature)
      << ' ' << target_property << "\n";
  out << "classes";
  for (const auto& cls : classes) out << ' ' << cls;
  out << "\n";
  out << "vectors " << weights.size() << "\n";
  for (size_t c = 0; c < weights.size(); ++c) {
    out << "bias " << format_number(bias[c]) << "\n";
    out << "nnz " << weights[c].size() << "\n";
    for (const auto& [index, value] : weights[c].entries())
      out << index << ' ' << format_number(value) << "\n";
  }
}

namespace {

std::string read_line(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorKind::ParseError, "truncated model file");
  return line;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string word;
  while (ss >> word) out.push_back(word);
  return out;
}

}  // namespace

LinearModel LinearModel::load(std::istream& in) {
  LinearModel model;
  auto magic = split_ws(read_line(in));
  if (magic.size() != 2 || magic[0] != kModelMagic || magic[1] != "v1")
    throw Error(ErrorKind::ParseError, "not a model file");

  auto task_line = split_ws(read_line(in));
  if (task_line.size() != 2 || task_line[0] != "task")
    throw Error(ErrorKind::ParseError, "bad task line");
  if (task_line[1] == "binary") model.task = ModelTask::Binary;
  else if (task_line[1] == "multiclass") model.task = ModelTask::Multiclass;
  else if (task_line[1] == "regression") model.task = ModelTask::Regression;
  else throw Error(ErrorKind::ParseError, "bad task '" + task_line[1] + "'");

  auto loss_line = split_ws(read_line(in));
  if (loss_line.size() != 2 || loss_line[0] != "loss")
    throw Error(ErrorKind::ParseError, "bad loss line");
  model.loss = parse_loss_kind(loss_line[1]);

  auto kernel_line = split_ws(read_line(in));
  if (kernel_line.size() != 13 || kernel_line[0] != "kernel")
    throw Error(ErrorKind::ParseError, "bad kernel line");
  model.kernel.max_radius = std::stoi(kernel_line[2]);
  model.kernel.max_distance = std::stoi(kernel_line[4]);
  model.kernel.match =
      kernel_line[6] == "hard" ? MatchKind::Hard : MatchKind::Soft;
  if (kernel_line[8] == "discrete") model.kernel.tuple_mode = TupleMode::Discrete;
  else if (kernel_line[8] == "real") model.kernel.tuple_mode = TupleMode::Real;
  else model.kernel.tuple_mode = TupleMode::Mixed;
  model.kernel.use_kernel_points = kernel_line[10] == "1";
  model.kernel.hash_bits = std::stoi(kernel_line[12]);

  auto train_line = split_ws(read_line(in));
  if (train_line.size() != 11 || train_line[0] != "train")
    throw Error(ErrorKind::ParseError, "bad train line");
  model.train.eta0 = std::stod(train_line[2]);
  model.train.decay = std::stod(train_line[4]);
  model.train.epochs = std::stoi(train_line[6]);
  model.train.lambda = std::stod(train_line[8]);
  model.train.seed = std::stoull(train_line[10]);

  auto target_line = split_ws(read_line(in));
  if (target_line.size() != 3 || target_line[0] != "target")
    throw Error(ErrorKind::ParseError, "bad target line");
  if (target_line[1] != "-") model.target_signature = target_line[1];
  model.target_property = std::stoi(target_line[2]);

  auto class_line = split_ws(read_line(in));
  if (class_line.empty() || class_line[0] != "classes")
    throw Error(ErrorKind::ParseError, "bad classes line");
  model.classes.assign(class_line.begin() + 1, class_line.end());

  auto vectors_line = split_ws(read_line(in));
  if (vectors_line.size() != 2 || vectors_line[0] != "vectors")
    throw Error(ErrorKind::ParseError, "bad vectors line");
  size_t vectors = std::stoul(vectors_line[1]);
  for (size_t c = 0; c < vectors; ++c) {
    auto bias_line = split_ws(read_line(in));
    if (bias_line.size() != 2 || bias_line[0] != "bias")
      throw Error(ErrorKind::ParseError, "bad bias line");
    model.bias.push_back(std::stod(bias_line[1]));
    auto nnz_line = split_ws(read_line(in));
    if (nnz_line.size() != 2 || nnz_line[0] != "nnz")
      throw Error(ErrorKind::ParseError, "bad nnz line");
    size_t nnz = std::stoul(nnz_line[1]);
    SparseFeatureVector w;
    for (size_t i = 0; i < nnz; ++i) {
      auto entry = split_ws(read_line(in));
      if (entry.size() != 2)
        throw Error(ErrorKind::ParseError, "bad weight line");
      w.set(std::stoull(entry[0]), std::stod(entry[1]));
    }
    model.weights.push_back(std::move(w));
  }
  return model;
}

void LinearModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorKind::IoError, "cannot write model file '" + path + "'");
  save(out);
}

LinearModel LinearModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::IoError, "cannot read model file '" + path + "'");
  return load(in);
}

}  // namespace relkit

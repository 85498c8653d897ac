#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "relkit/kernel.hpp"
#include "relkit/sparse.hpp"

namespace relkit {

enum class ModelTask { Binary, Multiclass, Regression };
enum class LossKind { Hinge, Logistic, Squared };

const char* model_task_name(ModelTask task);
const char* loss_kind_name(LossKind loss);
LossKind parse_loss_kind(const std::string& name);

struct TrainConfig {
  double eta0 = 0.1;     // initial learning rate
  double decay = 1e-3;   // eta_t = eta0 / (1 + decay * t)
  int epochs = 10;
  double lambda = 1e-4;  // L2 regularization
  std::uint64_t seed = 1;

  void validate() const;  // eta0 > 0, lambda >= 0, epochs >= 1
};

/// Training/prediction label. Binary tasks use number = +-1, regression uses
/// number, multiclass uses category.
struct Label {
  double number = 0.0;
  std::string category;

  static Label positive() { return {1.0, ""}; }
  static Label negative() { return {-1.0, ""}; }
  static Label of_number(double v) { return {v, ""}; }
  static Label of_category(std::string c) { return {0.0, std::move(c)}; }
};

struct Instance {
  SparseFeatureVector phi;
  Label label;
};

struct LinearModel {
  ModelTask task = ModelTask::Binary;
  LossKind loss = LossKind::Hinge;
  std::vector<std::string> classes;  // multiclass, declared order
  // binary/regression use weights[0] and bias[0]; multiclass one per class
  std::vector<SparseFeatureVector> weights;
  std::vector<double> bias;
  KernelConfig kernel;  // config snapshot for featurization at predict time
  TrainConfig train;
  std::string target_signature;  // task metadata for the CLI pipeline
  int target_property = -1;

  void save(std::ostream& out) const;
  static LinearModel load(std::istream& in);
  void save_file(const std::string& path) const;
  static LinearModel load_file(const std::string& path);
};

/// Regularized SGD on the chosen loss; deterministic given the seed.
/// Multiclass trains one binary model per class, one-vs-rest, in class order.
LinearModel train(const std::vector<Instance>& instances,
                  const TrainConfig& config, ModelTask task, LossKind loss,
                  const KernelConfig& kernel_snapshot);

struct ModelPrediction {
  double score = 0.0;  // binary: margin; multiclass: winning score; regression: value
  Label label;
};

ModelPrediction predict(const LinearModel& model,
                        const SparseFeatureVector& phi);

}  // namespace relkit

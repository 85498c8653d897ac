#include <doctest.h>

#include <sstream>

#include "relkit/cases.hpp"
#include "relkit/datalog.hpp"
#include "relkit/error.hpp"
#include "relkit/learner.hpp"
#include "support.hpp"

using namespace relkit;

namespace {

SparseFeatureVector vec(std::initializer_list<std::pair<std::uint64_t, double>>
                            entries) {
  SparseFeatureVector v;
  for (const auto& [index, value] : entries) v.set(index, value);
  return v;
}

}  // namespace

TEST_CASE("separable toy set reaches training accuracy 1") {
  std::vector<Instance> data;
  data.push_back({vec({{1, 1.0}}), Label::positive()});
  data.push_back({vec({{1, 0.9}}), Label::positive()});
  data.push_back({vec({{2, 1.0}}), Label::negative()});
  data.push_back({vec({{2, 1.1}}), Label::negative()});

  TrainConfig config;
  config.epochs = 100;
  config.eta0 = 0.5;
  config.lambda = 1e-4;
  LinearModel model =
      train(data, config, ModelTask::Binary, LossKind::Hinge, {});
  for (const auto& inst : data) {
    ModelPrediction p = predict(model, inst.phi);
    CHECK(p.label.number == inst.label.number);
  }
}

TEST_CASE("degenerate labels predict the constant class") {
  std::vector<Instance> data;
  data.push_back({vec({{1, 1.0}}), Label::positive()});
  data.push_back({vec({{2, 1.0}}), Label::positive()});
  TrainConfig config;
  config.epochs = 20;
  LinearModel model =
      train(data, config, ModelTask::Binary, LossKind::Logistic, {});
  CHECK(predict(model, vec({{3, 1.0}})).label.number == 1.0);
}

TEST_CASE("zero score breaks to the positive label") {
  LinearModel model;
  model.task = ModelTask::Binary;
  model.weights.push_back({});
  model.bias.push_back(0.0);
  ModelPrediction p = predict(model, {});
  CHECK(p.score == 0.0);
  CHECK(p.label.number == 1.0);
}

TEST_CASE("multiclass argmax breaks ties by declared order") {
  LinearModel model;
  model.task = ModelTask::Multiclass;
  model.classes = {"a", "b", "c"};
  model.weights.resize(3);
  model.bias = {0.2, 0.9, 0.9};
  ModelPrediction p = predict(model, {});
  CHECK(p.label.category == "b");
}

TEST_CASE("squared-loss SGD approaches least squares on two points") {
  // phi = 1 -> 1 and phi = 2 -> 3 share the feature, so the closed-form
  // least-squares fit is w = 2, b = -1
  std::vector<Instance> data;
  data.push_back({vec({{1, 1.0}}), Label::of_number(1.0)});
  data.push_back({vec({{1, 2.0}}), Label::of_number(3.0)});
  TrainConfig config;
  config.epochs = 6000;
  config.eta0 = 0.05;
  config.decay = 1e-4;
  config.lambda = 0.0;
  LinearModel model =
      train(data, config, ModelTask::Regression, LossKind::Squared, {});
  CHECK(model.weights[0].get(1) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(model.bias[0] == doctest::Approx(-1.0).epsilon(2e-3));
  CHECK(predict(model, vec({{1, 1.0}})).score ==
        doctest::Approx(1.0).epsilon(1e-3));
  CHECK(predict(model, vec({{1, 2.0}})).score ==
        doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("training is deterministic given the seed") {
  std::vector<Instance> data;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 40; ++i) {
    SparseFeatureVector phi;
    for (int j = 0; j < 6; ++j)
      if (rng() % 2) phi.set(j, static_cast<double>(rng() % 8) / 4.0);
    data.push_back({phi, rng() % 2 ? Label::positive() : Label::negative()});
  }
  TrainConfig config;
  config.epochs = 12;
  config.seed = 99;
  auto serialize = [&](const LinearModel& m) {
    std::ostringstream out;
    m.save(out);
    return out.str();
  };
  LinearModel a = train(data, config, ModelTask::Binary, LossKind::Hinge, {});
  LinearModel b = train(data, config, ModelTask::Binary, LossKind::Hinge, {});
  CHECK(serialize(a) == serialize(b));

  config.seed = 100;
  LinearModel c = train(data, config, ModelTask::Binary, LossKind::Hinge, {});
  CHECK(serialize(a) != serialize(c));  // the seed actually reaches SGD
}

TEST_CASE("feature scaling with matched eta keeps decisions") {
  std::vector<Instance> data;
  data.push_back({vec({{1, 1.0}}), Label::positive()});
  data.push_back({vec({{2, 1.0}}), Label::negative()});
  TrainConfig config;
  config.epochs = 50;
  config.eta0 = 0.2;
  config.lambda = 0.0;
  config.decay = 0.0;
  LinearModel base =
      train(data, config, ModelTask::Binary, LossKind::Hinge, {});

  std::vector<Instance> scaled = data;
  for (auto& inst : scaled) inst.phi.scale(4.0);
  TrainConfig scaled_config = config;
  scaled_config.eta0 = config.eta0 / 16.0;  // weights shrink by the square
  LinearModel rescaled =
      train(scaled, scaled_config, ModelTask::Binary, LossKind::Hinge, {});

  for (const auto& inst : data) {
    SparseFeatureVector big = inst.phi;
    big.scale(4.0);
    CHECK(predict(base, inst.phi).label.number ==
          predict(rescaled, big).label.number);
  }
}

TEST_CASE("empty training set and label mismatches raise") {
  TrainConfig config;
  CHECK_THROWS_AS(train({}, config, ModelTask::Binary, LossKind::Hinge, {}),
                  Error);
  std::vector<Instance> bad;
  bad.push_back({vec({{1, 1.0}}), Label::of_number(0.5)});
  try {
    train(bad, config, ModelTask::Binary, LossKind::Hinge, {});
    FAIL("expected LabelTaskMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LabelTaskMismatch);
  }
}

TEST_CASE("model serialization round-trips exactly") {
  std::vector<Instance> data;
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    SparseFeatureVector phi;
    phi.set(rng() % 1000, 0.1 + static_cast<double>(rng() % 100) / 7.0);
    phi.set(1000 + rng() % 1000, -1.5);
    const char* classes[] = {"x", "y", "z"};
    data.push_back({phi, Label::of_category(classes[i % 3])});
  }
  TrainConfig config;
  config.epochs = 6;
  KernelConfig kernel_config;
  kernel_config.match = MatchKind::Soft;
  LinearModel model = train(data, config, ModelTask::Multiclass,
                            LossKind::Logistic, kernel_config);
  model.target_signature = "category";
  model.target_property = 1;

  std::ostringstream out;
  model.save(out);
  std::istringstream in(out.str());
  LinearModel loaded = LinearModel::load(in);
  std::ostringstream again;
  loaded.save(again);
  CHECK(out.str() == again.str());
  CHECK(loaded.classes == model.classes);
  CHECK(loaded.kernel == model.kernel);
  CHECK(loaded.target_signature == "category");

  // predictions agree bit for bit
  for (const auto& inst : data) {
    CHECK(predict(model, inst.phi).label.category ==
          predict(loaded, inst.phi).label.category);
  }
}

TEST_CASE("uwcse case assembly enumerates the closed world") {
  Schema schema = parse_domain(testsupport::read_fixture("uwcse.domain"));
  auto interps = parse_interpretations(
      testsupport::read_fixture("uwcse.facts"), schema);
  Interpretation interp = interps[0];
  AtomSet derived = evaluate_intensional(schema, interp.atoms);
  interp.atoms.insert(derived.begin(), derived.end());
  auto kinds = infer_property_kinds(schema, {interp});

  Job job{{"advised_by"}};
  auto tasks = expand_job(schema, kinds, job);
  REQUIRE(tasks.size() == 1);
  KernelConfig config;
  config.match = MatchKind::Soft;
  config.tuple_mode = derive_tuple_mode(schema, kinds);
  auto cases = assemble_cases(schema, job, tasks[0], {interp}, kinds, config);

  // 4 students x 2 professors = 8 candidate links, 2 of them positive
  CHECK(cases.size() == 8);
  int positives = 0;
  for (const auto& c : cases)
    if (c.label.number > 0) ++positives;
  CHECK(positives == 2);

  // negative capping with a seed keeps determinism
  AssembleOptions capped;
  capped.max_negatives_per_interpretation = 3;
  capped.seed = 7;
  auto a = assemble_cases(schema, job, tasks[0], {interp}, kinds, config, capped);
  auto b = assemble_cases(schema, job, tasks[0], {interp}, kinds, config, capped);
  CHECK(a.size() == 5);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].id == b[i].id);
}

TEST_CASE("zero-arity target yields one case per interpretation") {
  Schema schema = parse_domain(
      "signature atom(x::self, e::property)::extensional.\n"
      "signature bond(a::atom, b::atom)::extensional.\n"
      "signature mutagenic::extensional.\n");
  auto interps = parse_interpretations(
      "interpretation m1.\natom(a1, c). atom(a2, n). bond(a1, a2).\n"
      "mutagenic.\n"
      "interpretation m2.\natom(b1, o).\n",
      schema);
  auto kinds = infer_property_kinds(schema, interps);
  Job job{{"mutagenic"}};
  auto tasks = expand_job(schema, kinds, job);
  KernelConfig config;
  auto cases = assemble_cases(schema, job, tasks[0], interps, kinds, config);
  REQUIRE(cases.size() == 2);
  CHECK(cases[0].label.number == 1.0);
  CHECK(cases[1].label.number == -1.0);
}

TEST_CASE("regression target reads the numeric property") {
  Schema schema = parse_domain(
      "signature atom(x::self)::extensional.\n"
      "signature biodegradation(halflife::property)::extensional.\n");
  auto interps = parse_interpretations(
      "interpretation c1.\natom(a1). biodegradation(2.5).\n"
      "interpretation c2.\natom(b1). biodegradation(4).\n",
      schema);
  auto kinds = infer_property_kinds(schema, interps);
  Job job{{"biodegradation"}};
  auto tasks = expand_job(schema, kinds, job);
  REQUIRE(tasks.size() == 1);
  CHECK(tasks[0].kind == TaskKind::RegressionInterpretation);
  KernelConfig config;
  auto cases = assemble_cases(schema, job, tasks[0], interps, kinds, config);
  REQUIRE(cases.size() == 2);
  CHECK(cases[0].label.number == doctest::Approx(2.5));
  CHECK(cases[1].label.number == doctest::Approx(4.0));
}

TEST_CASE("entity-set targets are rejected") {
  Schema schema = parse_domain(
      "signature page(p::self, cat::property)::extensional.\n");
  auto interps = parse_interpretations(
      "interpretation w.\npage(p1, course).\n", schema);
  auto kinds = infer_property_kinds(schema, interps);
  Job job{{"page"}};
  auto tasks = expand_job(schema, kinds, job);
  KernelConfig config;
  CHECK_THROWS_AS(
      assemble_cases(schema, job, tasks[0], interps, kinds, config), Error);
}

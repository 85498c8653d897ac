#include <benchmark/benchmark.h>

#include "relkit/cases.hpp"
#include "relkit/datalog.hpp"
#include "relkit/dataset.hpp"
#include "relkit/learner.hpp"
#include "relkit/schema.hpp"
#include "synthetic.hpp"

using namespace relkit;

namespace {

struct Prepared {
  Schema schema;
  std::vector<Interpretation> interps;
  PropertyKindTable kinds;
};

Prepared prepare(int interpretations) {
  Prepared p;
  p.schema = parse_domain(testsupport::kSyntheticDomain);
  p.interps = parse_interpretations(
      testsupport::synthetic_facts(interpretations, 99), p.schema);
  for (auto& interp : p.interps) {
    AtomSet derived = evaluate_intensional(p.schema, interp.atoms);
    interp.atoms.insert(derived.begin(), derived.end());
  }
  p.kinds = infer_property_kinds(p.schema, p.interps);
  return p;
}

}  // namespace

static void BM_rule_derivation(benchmark::State& state) {
  Schema schema = parse_domain(testsupport::kSyntheticDomain);
  auto interps = parse_interpretations(
      testsupport::synthetic_facts(static_cast<int>(state.range(0)), 7),
      schema);
  for (auto _ : state) {
    size_t total = 0;
    for (const auto& interp : interps)
      total += evaluate_intensional(schema, interp.atoms).size();
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_rule_derivation)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_case_assembly(benchmark::State& state) {
  Prepared p = prepare(static_cast<int>(state.range(0)));
  Job job{{"advised_by"}};
  Task task = expand_job(p.schema, p.kinds, job).at(0);
  KernelConfig config;
  config.max_radius = 2;
  config.max_distance = 2;
  config.match = MatchKind::Soft;
  for (auto _ : state) {
    auto cases =
        assemble_cases(p.schema, job, task, p.interps, p.kinds, config, {});
    benchmark::DoNotOptimize(cases);
  }
}
BENCHMARK(BM_case_assembly)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_sgd_training(benchmark::State& state) {
  Prepared p = prepare(25);
  Job job{{"advised_by"}};
  Task task = expand_job(p.schema, p.kinds, job).at(0);
  KernelConfig config;
  config.max_radius = 2;
  config.max_distance = 2;
  config.match = MatchKind::Soft;
  auto cases =
      assemble_cases(p.schema, job, task, p.interps, p.kinds, config, {});
  std::vector<Instance> instances;
  for (auto& c : cases) instances.push_back({c.phi, c.label});
  TrainConfig train_config;
  train_config.epochs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    LinearModel model = train(instances, train_config, ModelTask::Binary,
                              LossKind::Hinge, config);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_sgd_training)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

// relkit command line: check, graphicalize, featurize, train, predict,
// evaluate. Exit codes: 0 success, 1 usage or domain-program errors, 2 data
// errors, 3 runtime errors.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "relkit/cases.hpp"
#include "relkit/cv.hpp"
#include "relkit/datalog.hpp"
#include "relkit/dataset.hpp"
#include "relkit/error.hpp"
#include "relkit/graph.hpp"
#include "relkit/kernel.hpp"
#include "relkit/learner.hpp"
#include "relkit/schema.hpp"
#include "relkit/util.hpp"

namespace fs = std::filesystem;
using namespace relkit;

namespace {

struct CommonFlags {
  std::string domain_path;
  std::string facts_path;
  std::vector<std::string> targets;
  std::vector<std::string> kernel_points;
  int radius = 2;
  int distance = 2;
  std::string match = "hard";
  std::string loss = "hinge";
  int epochs = 10;
  double eta = 0.1;
  double decay = 1e-3;
  double lambda = 1e-4;
  std::uint64_t seed = 1;
  int jobs = 1;
  int max_negatives = 0;
};

void add_data_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--domain", flags.domain_path, "domain declaration file")
      ->required();
  cmd->add_option("--facts", flags.facts_path, "ground fact file")->required();
}

void add_kernel_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--radius", flags.radius, "maximum neighborhood radius r*");
  cmd->add_option("--distance", flags.distance, "maximum root distance d*");
  cmd->add_option("--match", flags.match, "subgraph match kind")
      ->check(CLI::IsMember({"hard", "soft"}));
  cmd->add_option("--kernel-points", flags.kernel_points,
                  "signatures whose vertices may serve as neighborhood roots");
}

void add_train_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--loss", flags.loss, "training loss")
      ->check(CLI::IsMember({"hinge", "logistic", "squared"}));
  cmd->add_option("--epochs", flags.epochs, "SGD epochs");
  cmd->add_option("--eta", flags.eta, "initial learning rate");
  cmd->add_option("--decay", flags.decay, "learning rate decay");
  cmd->add_option("--lambda", flags.lambda, "L2 regularization");
  cmd->add_option("--seed", flags.seed, "random seed");
  cmd->add_option("--max-negatives", flags.max_negatives,
                  "cap sampled negative cases per interpretation (0 = all)");
}

struct LoadedData {
  Schema schema;
  std::vector<Interpretation> interps;  // with derived intensional atoms
  PropertyKindTable kinds;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  out << contents;
  if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path + "'");
}

LoadedData load_pipeline(const CommonFlags& flags) {
  LoadedData data;
  data.schema = parse_domain(read_file(flags.domain_path));
  if (!flags.kernel_points.empty())
    set_kernel_points(data.schema, flags.kernel_points);
  data.interps = load_interpretations(flags.facts_path, data.schema);
  // interpretations derive independently
  parallel_for(data.interps.size(), flags.jobs, [&](size_t i) {
    AtomSet derived = evaluate_intensional(data.schema, data.interps[i].atoms);
    data.interps[i].atoms.insert(derived.begin(), derived.end());
  });
  // kinds are inferred after derivation: intensional atoms carry properties
  data.kinds = infer_property_kinds(data.schema, data.interps);
  return data;
}

KernelConfig kernel_config_from(const CommonFlags& flags,
                                const LoadedData& data) {
  KernelConfig config;
  config.max_radius = flags.radius;
  config.max_distance = flags.distance;
  config.match = flags.match == "soft" ? MatchKind::Soft : MatchKind::Hard;
  config.tuple_mode = derive_tuple_mode(data.schema, data.kinds);
  config.use_kernel_points = !flags.kernel_points.empty();
  config.validate();
  return config;
}

TrainConfig train_config_from(const CommonFlags& flags) {
  TrainConfig config;
  config.eta0 = flags.eta;
  config.decay = flags.decay;
  config.epochs = flags.epochs;
  config.lambda = flags.lambda;
  config.seed = flags.seed;
  config.validate();
  return config;
}

Task single_task(const LoadedData& data, const Job& job,
                 const std::string& target) {
  auto tasks = expand_job(data.schema, data.kinds, job);
  for (const auto& task : tasks)
    if (task.target == target) return task;
  throw Error(ErrorKind::UnknownTarget,
              "target '" + target + "' yields no task");
}

std::string label_text(const Label& label, ModelTask task) {
  switch (task) {
    case ModelTask::Binary: return label.number > 0 ? "+1" : "-1";
    case ModelTask::Multiclass: return label.category;
    case ModelTask::Regression: return format_number(label.number);
  }
  return "?";
}

int cmd_check(const CommonFlags& flags) {
  LoadedData data = load_pipeline(flags);
  size_t atoms = 0;
  for (const auto& interp : data.interps) atoms += interp.atoms.size();
  std::cout << "ok: " << data.schema.signatures.size() << " signatures, "
            << data.interps.size() << " interpretations, " << atoms
            << " atoms (intensional included)\n";
  return 0;
}

int cmd_graphicalize(const CommonFlags& flags, const std::string& dot_dir,
                     const std::string& adjacency_dir) {
  LoadedData data = load_pipeline(flags);
  std::error_code ec;
  if (!dot_dir.empty()) fs::create_directories(dot_dir, ec);
  if (!adjacency_dir.empty()) fs::create_directories(adjacency_dir, ec);
  for (const auto& interp : data.interps) {
    GroundedGraph graph = graphicalize(data.schema, interp.atoms, data.kinds);
    if (!dot_dir.empty())
      write_file((fs::path(dot_dir) / (interp.id + ".dot")).string(),
                 export_dot(graph));
    if (!adjacency_dir.empty())
      write_file((fs::path(adjacency_dir) / (interp.id + ".tsv")).string(),
                 export_adjacency(graph));
  }
  std::cout << "wrote " << data.interps.size() << " graph files\n";
  return 0;
}

int cmd_featurize(const CommonFlags& flags, const std::string& out_path) {
  if (flags.targets.empty())
    throw Error(ErrorKind::UsageError, "featurize needs --target");
  LoadedData data = load_pipeline(flags);
  Job job{flags.targets};
  KernelConfig kernel_config = kernel_config_from(flags, data);
  AssembleOptions options;
  options.jobs = flags.jobs;
  options.seed = flags.seed;
  options.max_negatives_per_interpretation = flags.max_negatives;

  std::string out;
  for (const auto& task : expand_job(data.schema, data.kinds, job)) {
    auto cases = assemble_cases(data.schema, job, task, data.interps,
                                data.kinds, kernel_config, options);
    ModelTask model_task = model_task_of(task);
    for (const auto& c : cases) {
      out += c.phi.to_text_line(label_text(c.label, model_task));
      out += '\n';
    }
  }
  if (out_path.empty())
    std::cout << out;
  else
    write_file(out_path, out);
  return 0;
}

int cmd_train(const CommonFlags& flags, const std::string& out_path) {
  if (flags.targets.empty())
    throw Error(ErrorKind::UsageError, "train needs --target");
  LoadedData data = load_pipeline(flags);
  Job job{flags.targets};
  KernelConfig kernel_config = kernel_config_from(flags, data);
  TrainConfig train_config = train_config_from(flags);
  LossKind loss = parse_loss_kind(flags.loss);
  AssembleOptions options;
  options.jobs = flags.jobs;
  options.seed = flags.seed;
  options.max_negatives_per_interpretation = flags.max_negatives;

  auto tasks = expand_job(data.schema, data.kinds, job);
  for (const auto& task : tasks) {
    auto cases = assemble_cases(data.schema, job, task, data.interps,
                                data.kinds, kernel_config, options);
    std::vector<Instance> instances;
    instances.reserve(cases.size());
    for (auto& c : cases) instances.push_back({std::move(c.phi), c.label});
    ModelTask model_task = model_task_of(task);
    LossKind task_loss =
        model_task == ModelTask::Regression ? LossKind::Squared : loss;
    LinearModel model =
        train(instances, train_config, model_task, task_loss, kernel_config);
    model.target_signature = task.target;
    model.target_property = task.property_column;

    std::string path = out_path;
    if (tasks.size() > 1) {
      path += "." + task.target;
      if (task.property_column >= 0)
        path += "." + std::to_string(task.property_column);
    }
    model.save_file(path);
    std::cout << "model " << path << " trained on " << instances.size()
              << " cases\n";
  }
  return 0;
}

int cmd_predict(const CommonFlags& flags, const std::string& model_path,
                const std::string& out_path, const CLI::App* cmd) {
  LinearModel model = LinearModel::load_file(model_path);
  if (model.target_signature.empty())
    throw Error(ErrorKind::ConfigMismatch, "model carries no target metadata");

  // explicit kernel flags must agree with the model snapshot
  if (cmd->count("--radius") && flags.radius != model.kernel.max_radius)
    throw Error(ErrorKind::ConfigMismatch,
                "--radius disagrees with the model's kernel config");
  if (cmd->count("--distance") && flags.distance != model.kernel.max_distance)
    throw Error(ErrorKind::ConfigMismatch,
                "--distance disagrees with the model's kernel config");
  if (cmd->count("--match")) {
    MatchKind requested =
        flags.match == "soft" ? MatchKind::Soft : MatchKind::Hard;
    if (requested != model.kernel.match)
      throw Error(ErrorKind::ConfigMismatch,
                  "--match disagrees with the model's kernel config");
  }
  if (!flags.targets.empty() && flags.targets[0] != model.target_signature)
    throw Error(ErrorKind::ConfigMismatch,
                "--target disagrees with the model's target");

  LoadedData data = load_pipeline(flags);
  Job job{{model.target_signature}};
  Task task = single_task(data, job, model.target_signature);
  AssembleOptions options;
  options.jobs = flags.jobs;
  options.seed = flags.seed;
  options.max_negatives_per_interpretation = 0;  // score every grounding

  auto cases = assemble_cases(data.schema, job, task, data.interps, data.kinds,
                              model.kernel, options);
  std::string out;
  for (const auto& c : cases) {
    ModelPrediction prediction = predict(model, c.phi);
    out += c.id;
    out += ' ';
    out += format_number(prediction.score);
    out += ' ';
    out += label_text(prediction.label, model.task);
    out += '\n';
  }
  if (out_path.empty())
    std::cout << out;
  else
    write_file(out_path, out);
  return 0;
}

int cmd_evaluate(const CommonFlags& flags, int folds, bool loo,
                 const std::string& slice_key, int frame,
                 const std::string& out_path) {
  if (flags.targets.empty())
    throw Error(ErrorKind::UsageError, "evaluate needs --target");
  LoadedData data = load_pipeline(flags);
  Job job{flags.targets};
  KernelConfig kernel_config = kernel_config_from(flags, data);
  TrainConfig train_config = train_config_from(flags);
  LossKind loss = parse_loss_kind(flags.loss);
  AssembleOptions options;
  options.jobs = flags.jobs;
  options.seed = flags.seed;
  options.max_negatives_per_interpretation = flags.max_negatives;

  FoldPlan plan;
  if (!slice_key.empty()) {
    auto dot = slice_key.find('.');
    if (dot == std::string::npos)
      throw Error(ErrorKind::UsageError,
                  "--slice-key takes <relation>.<column>");
    plan.mode = FoldPlan::Mode::SliceForward;
    plan.slice_relation = slice_key.substr(0, dot);
    plan.slice_column = slice_key.substr(dot + 1);
    plan.frame = frame;
  } else if (loo) {
    plan.mode = FoldPlan::Mode::LeaveOneOut;
  } else {
    plan.mode = FoldPlan::Mode::KFold;
    plan.k = folds;
    plan.shuffle_seed = flags.seed;
  }

  std::string machine;
  for (const auto& task : expand_job(data.schema, data.kinds, job)) {
    Report report = run_cv(data.schema, job, task, data.interps, data.kinds,
                           kernel_config, train_config, loss, plan, options);
    std::cout << "== target " << task.target;
    if (task.property_column >= 0)
      std::cout << " property " << task.property_column + 1;
    std::cout << " (" << task_kind_name(task.kind) << ")\n";
    std::cout << report.to_text();
    machine += report.to_machine();
  }
  if (!out_path.empty()) write_file(out_path, machine);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relational learning with neighborhood-subgraph graph kernels"};
  app.require_subcommand(1);
  // key=value config file; keys live in a [subcommand] section or use the
  // dotted form, e.g. train.radius=2
  app.set_config("--config", "", "key=value configuration file");

  CommonFlags flags;
  std::string dot_dir;
  std::string out_path;
  std::string model_path;
  int folds = 10;
  bool loo = false;
  std::string slice_key;
  int frame = 2;

  CLI::App* check = app.add_subcommand("check", "parse, validate, and derive");
  add_data_flags(check, flags);
  check->add_option("--jobs", flags.jobs, "worker threads");

  std::string adjacency_dir;
  CLI::App* graphicalize_cmd =
      app.add_subcommand("graphicalize", "write one DOT file per interpretation");
  add_data_flags(graphicalize_cmd, flags);
  graphicalize_cmd->add_option("--dot", dot_dir, "DOT output directory");
  graphicalize_cmd->add_option("--adjacency", adjacency_dir,
                               "tab-separated edge dump directory");
  graphicalize_cmd->add_option("--jobs", flags.jobs, "worker threads");

  CLI::App* featurize = app.add_subcommand(
      "featurize", "write sparse feature vectors, one case per line");
  add_data_flags(featurize, flags);
  featurize->add_option("--target", flags.targets, "target signature")
      ->required();
  add_kernel_flags(featurize, flags);
  featurize->add_option("--out", out_path, "output file (default stdout)");
  featurize->add_option("--jobs", flags.jobs, "worker threads");
  featurize->add_option("--seed", flags.seed, "random seed");
  featurize->add_option("--max-negatives", flags.max_negatives,
                        "cap sampled negatives per interpretation");

  CLI::App* train_cmd = app.add_subcommand("train", "fit a linear model");
  add_data_flags(train_cmd, flags);
  train_cmd->add_option("--target", flags.targets, "target signature")
      ->required();
  add_kernel_flags(train_cmd, flags);
  add_train_flags(train_cmd, flags);
  train_cmd->add_option("--out", out_path, "model file")->required();
  train_cmd->add_option("--jobs", flags.jobs, "worker threads");

  CLI::App* predict_cmd =
      app.add_subcommand("predict", "score cases with a trained model");
  add_data_flags(predict_cmd, flags);
  predict_cmd->add_option("--model", model_path, "model file")->required();
  predict_cmd->add_option("--target", flags.targets,
                          "target signature (must match the model)");
  add_kernel_flags(predict_cmd, flags);
  predict_cmd->add_option("--out", out_path, "prediction file (default stdout)");
  predict_cmd->add_option("--jobs", flags.jobs, "worker threads");

  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "cross-validated training and metrics");
  add_data_flags(evaluate_cmd, flags);
  evaluate_cmd->add_option("--target", flags.targets, "target signature")
      ->required();
  add_kernel_flags(evaluate_cmd, flags);
  add_train_flags(evaluate_cmd, flags);
  evaluate_cmd->add_option("--folds", folds, "k-fold cross validation");
  evaluate_cmd->add_flag("--loo", loo, "leave-one-interpretation-out");
  evaluate_cmd->add_option("--slice-key", slice_key,
                           "slice-forward evaluation key <relation>.<column>");
  evaluate_cmd->add_option("--frame", frame,
                           "training frame width for --slice-key");
  evaluate_cmd->add_option("--out", out_path, "machine-readable report file");
  evaluate_cmd->add_option("--jobs", flags.jobs, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (check->parsed()) return cmd_check(flags);
    if (graphicalize_cmd->parsed()) {
      if (dot_dir.empty() && adjacency_dir.empty())
        throw Error(ErrorKind::UsageError,
                    "graphicalize needs --dot or --adjacency");
      return cmd_graphicalize(flags, dot_dir, adjacency_dir);
    }
    if (featurize->parsed()) return cmd_featurize(flags, out_path);
    if (train_cmd->parsed()) return cmd_train(flags, out_path);
    if (predict_cmd->parsed())
      return cmd_predict(flags, model_path, out_path, predict_cmd);
    if (evaluate_cmd->parsed())
      return cmd_evaluate(flags, folds, loo, slice_key, frame, out_path);
  } catch (const Error& e) {
    std::cerr << "relkit: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "relkit: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "synthetic.hpp"

#ifndef RELKIT_BIN
#define RELKIT_BIN "relkit"
#endif

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  fs::path out = fs::temp_directory_path() / "relkit_cli_out.txt";
  std::string command =
      std::string(RELKIT_BIN) + " " + args + " > " + out.string() + " 2>&1";
  int status = std::system(command.c_str());
  std::ifstream in(out);
  std::ostringstream buf;
  buf << in.rdbuf();
  int code = status == -1 ? -1 : WEXITSTATUS(status);
  return {code, buf.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "relkit_cli_work";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("check accepts the fixtures") {
  auto result = run_cli("check --domain " + testsupport::fixture_path("uwcse.domain") +
                        " --facts " + testsupport::fixture_path("uwcse.facts"));
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("ok:") != std::string::npos);
}

TEST_CASE("check rejects malformed domains with exit 1") {
  fs::path dir = temp_dir();
  fs::path bad = dir / "bad.domain";
  std::ofstream(bad) << "signature broken(::extensional.\n";
  auto result = run_cli("check --domain " + bad.string() + " --facts " +
                        testsupport::fixture_path("uwcse.facts"));
  CHECK(result.exit_code == 1);
  CHECK(result.output.find("SyntaxError") != std::string::npos);
}

TEST_CASE("check rejects dangling identifiers with exit 2") {
  fs::path dir = temp_dir();
  fs::path facts = dir / "dangling.facts";
  std::ofstream(facts) << "interpretation t.\nstudent(s1).\n"
                          "professor(p1).\nadvised_by(s1, ghost).\n";
  // dangling references surface at graphicalization
  auto result =
      run_cli("graphicalize --domain " + testsupport::fixture_path("uwcse.domain") +
              " --facts " + facts.string() + " --dot " +
              (dir / "dots").string());
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("DanglingIdentifier") != std::string::npos);
}

TEST_CASE("graphicalize writes one dot file per interpretation") {
  fs::path dir = temp_dir() / "dots";
  fs::remove_all(dir);
  auto result = run_cli(
      "graphicalize --domain " + testsupport::fixture_path("uwcse.domain") +
      " --facts " + testsupport::fixture_path("uwcse.facts") + " --dot " +
      dir.string());
  REQUIRE(result.exit_code == 0);
  std::string dot = slurp(dir / "ai.dot");
  size_t nodes = 0, edges = 0;
  std::istringstream lines(dot);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find("--") != std::string::npos) ++edges;
    else if (line.find("[label=") != std::string::npos) ++nodes;
  }
  CHECK(nodes == 23);
  CHECK(edges == 32);
}

TEST_CASE("featurize emits sorted sparse lines") {
  auto result = run_cli(
      "featurize --domain " + testsupport::fixture_path("uwcse.domain") +
      " --facts " + testsupport::fixture_path("uwcse.facts") +
      " --target advised_by --match soft --radius 1 --distance 1");
  REQUIRE(result.exit_code == 0);
  std::istringstream lines(result.output);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++count;
    CHECK((line.rfind("+1 ", 0) == 0 || line.rfind("-1 ", 0) == 0));
    // indices strictly increase along the line
    std::istringstream words(line);
    std::string label_word, pair;
    words >> label_word;
    unsigned long long previous = 0;
    bool first = true;
    while (words >> pair) {
      auto colon = pair.find(':');
      REQUIRE(colon != std::string::npos);
      unsigned long long index = std::stoull(pair.substr(0, colon));
      if (!first) CHECK(index > previous);
      previous = index;
      first = false;
    }
  }
  CHECK(count == 8);  // 2 positives + 6 closed-world negatives
}

TEST_CASE("train, predict, and evaluate run end to end") {
  fs::path dir = temp_dir();
  fs::path domain = dir / "synth.domain";
  fs::path facts = dir / "synth.facts";
  std::ofstream(domain) << testsupport::kSyntheticDomain;
  std::ofstream(facts) << testsupport::synthetic_facts(12, 77);

  fs::path model = dir / "model.txt";
  std::string common = " --domain " + domain.string() + " --facts " +
                       facts.string() + " --target advised_by" +
                       " --match soft --radius 2 --distance 2" +
                       " --epochs 8 --eta 0.5 --seed 3";
  auto train_result =
      run_cli("train" + common + " --out " + model.string());
  REQUIRE(train_result.exit_code == 0);

  auto predict_result = run_cli("predict --domain " + domain.string() +
                                " --facts " + facts.string() + " --model " +
                                model.string());
  REQUIRE(predict_result.exit_code == 0);
  // one `case_id score label` line per candidate link
  std::istringstream lines(predict_result.output);
  std::string line;
  int count = 0;
  while (std::getline(lines, line))
    if (!line.empty()) ++count;
  CHECK(count > 12);

  auto evaluate_result =
      run_cli("evaluate" + common + " --folds 3 --out " +
              (dir / "report.txt").string());
  REQUIRE(evaluate_result.exit_code == 0);
  CHECK(evaluate_result.output.find("auroc") != std::string::npos);
  CHECK(slurp(dir / "report.txt").find("aggregate auroc mean") !=
        std::string::npos);
}

TEST_CASE("graphicalize on empty facts writes nothing and succeeds") {
  fs::path dir = temp_dir();
  fs::path facts = dir / "empty.facts";
  std::ofstream(facts) << "% nothing here\n";
  fs::path out = dir / "empty_dots";
  fs::remove_all(out);
  auto result = run_cli(
      "graphicalize --domain " + testsupport::fixture_path("uwcse.domain") +
      " --facts " + facts.string() + " --dot " + out.string());
  CHECK(result.exit_code == 0);
  int files = 0;
  if (fs::exists(out))
    for (const auto& entry : fs::directory_iterator(out)) {
      (void)entry;
      ++files;
    }
  CHECK(files == 0);
}

TEST_CASE("unwritable dot directory exits with an I/O error") {
  auto result = run_cli(
      "graphicalize --domain " + testsupport::fixture_path("uwcse.domain") +
      " --facts " + testsupport::fixture_path("uwcse.facts") +
      " --dot /proc/relkit_cannot_write");
  CHECK(result.exit_code == 3);
}

TEST_CASE("config file supplies flag defaults") {
  fs::path dir = temp_dir();
  fs::path config = dir / "run.conf";
  std::ofstream(config) << "[check]\ndomain="
                        << testsupport::fixture_path("uwcse.domain")
                        << "\nfacts=" << testsupport::fixture_path("uwcse.facts")
                        << "\n";
  auto result = run_cli("--config " + config.string() + " check");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("ok:") != std::string::npos);
}

TEST_CASE("leave-one-group-out on the advisor fixture produces a report") {
  fs::path dir = temp_dir();
  auto result = run_cli(
      "evaluate --domain " + testsupport::fixture_path("uwcse.domain") +
      " --facts " + testsupport::fixture_path("uwcse_groups.facts") +
      " --target advised_by --match soft --radius 2 --distance 2 --loo" +
      " --epochs 10 --out " + (dir / "uwcse_report.txt").string());
  REQUIRE(result.exit_code == 0);
  std::string machine = slurp(dir / "uwcse_report.txt");
  CHECK(machine.find("fold ai ") != std::string::npos);
  CHECK(machine.find("fold graphics ") != std::string::npos);
}

TEST_CASE("kernel points restrict featurization") {
  std::string base =
      "featurize --domain " + testsupport::fixture_path("uwcse.domain") +
      " --facts " + testsupport::fixture_path("uwcse.facts") +
      " --target advised_by --match soft --radius 1 --distance 2";
  auto unrestricted = run_cli(base);
  auto restricted = run_cli(base + " --kernel-points student");
  REQUIRE(unrestricted.exit_code == 0);
  REQUIRE(restricted.exit_code == 0);
  CHECK(restricted.output != unrestricted.output);
  auto unknown = run_cli(base + " --kernel-points nosuchsignature");
  CHECK(unknown.exit_code == 2);
}

TEST_CASE("worker count does not change featurization output") {
  std::string base =
      "featurize --domain " + testsupport::fixture_path("uwcse.domain") +
      " --facts " + testsupport::fixture_path("uwcse.facts") +
      " --target advised_by --match soft --radius 2 --distance 2";
  auto serial = run_cli(base + " --jobs 1");
  auto parallel = run_cli(base + " --jobs 4");
  REQUIRE(serial.exit_code == 0);
  REQUIRE(parallel.exit_code == 0);
  CHECK(serial.output == parallel.output);
}

TEST_CASE("worker count does not change evaluation reports") {
  fs::path dir = temp_dir();
  fs::path domain = dir / "jobs.domain";
  fs::path facts = dir / "jobs.facts";
  std::ofstream(domain) << testsupport::kSyntheticDomain;
  std::ofstream(facts) << testsupport::synthetic_facts(10, 31);
  std::string base = "evaluate --domain " + domain.string() + " --facts " +
                     facts.string() +
                     " --target advised_by --match soft --radius 1"
                     " --distance 2 --epochs 4 --seed 9 --folds 3 --out ";
  fs::path a = dir / "report_j1.txt";
  fs::path b = dir / "report_j4.txt";
  REQUIRE(run_cli(base + a.string() + " --jobs 1").exit_code == 0);
  REQUIRE(run_cli(base + b.string() + " --jobs 4").exit_code == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("predict with mismatched kernel flags exits with ConfigMismatch") {
  fs::path dir = temp_dir();
  fs::path domain = dir / "synth2.domain";
  fs::path facts = dir / "synth2.facts";
  std::ofstream(domain) << testsupport::kSyntheticDomain;
  std::ofstream(facts) << testsupport::synthetic_facts(4, 5);
  fs::path model = dir / "model2.txt";
  auto trained = run_cli("train --domain " + domain.string() + " --facts " +
                         facts.string() +
                         " --target advised_by --match soft --epochs 2" +
                         " --out " + model.string());
  REQUIRE(trained.exit_code == 0);
  auto result = run_cli("predict --domain " + domain.string() + " --facts " +
                        facts.string() + " --model " + model.string() +
                        " --match hard");
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("ConfigMismatch") != std::string::npos);
}

TEST_CASE("multitask jobs write one model per task") {
  fs::path dir = temp_dir();
  fs::path domain = dir / "multi.domain";
  fs::path facts = dir / "multi.facts";
  std::ofstream(domain) << "signature atom(x::self)::extensional.\n"
                           "signature active::extensional.\n"
                           "signature halflife(h::property)::extensional.\n";
  std::ofstream(facts) << "interpretation c1.\natom(a1). active. halflife(2).\n"
                          "interpretation c2.\natom(b1). halflife(5).\n"
                          "interpretation c3.\natom(d1). active. halflife(1).\n";
  fs::path model = dir / "multi_model.txt";
  auto result = run_cli("train --domain " + domain.string() + " --facts " +
                        facts.string() +
                        " --target active --target halflife --epochs 3" +
                        " --out " + model.string());
  REQUIRE(result.exit_code == 0);
  CHECK(fs::exists(dir / "multi_model.txt.active"));
  CHECK(fs::exists(dir / "multi_model.txt.halflife.0"));
}

TEST_CASE("identical runs produce identical artifacts") {
  fs::path dir = temp_dir();
  fs::path domain = dir / "synth3.domain";
  fs::path facts = dir / "synth3.facts";
  std::ofstream(domain) << testsupport::kSyntheticDomain;
  std::ofstream(facts) << testsupport::synthetic_facts(8, 21);

  std::string common = " --domain " + domain.string() + " --facts " +
                       facts.string() +
                       " --target advised_by --match soft --radius 1"
                       " --distance 2 --epochs 5 --seed 11";
  fs::path model_a = dir / "model_a.txt";
  fs::path model_b = dir / "model_b.txt";
  REQUIRE(run_cli("train" + common + " --out " + model_a.string()).exit_code == 0);
  REQUIRE(run_cli("train" + common + " --out " + model_b.string()).exit_code == 0);
  CHECK(slurp(model_a) == slurp(model_b));
}

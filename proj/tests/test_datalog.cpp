#include <doctest.h>

#include "oracles.hpp"
#include "relkit/datalog.hpp"
#include "relkit/dataset.hpp"
#include "relkit/error.hpp"
#include "support.hpp"

using namespace relkit;

namespace {

Schema uwcse_schema() {
  return parse_domain(testsupport::read_fixture("uwcse.domain"));
}

AtomSet uwcse_atoms(const Schema& schema) {
  auto interps =
      parse_interpretations(testsupport::read_fixture("uwcse.facts"), schema);
  REQUIRE(interps.size() == 1);
  return interps[0].atoms;
}

}  // namespace

TEST_CASE("positive-only program lands in a single stratum") {
  Schema schema = uwcse_schema();
  auto strata = stratify(collect_rules(schema), schema);
  // on_same_course and on_same_paper only read extensional data;
  // n_common_papers aggregates and is pushed above the base
  REQUIRE(strata.size() >= 1);
  bool found_osp = false;
  for (const auto& p : strata[0].predicates)
    if (p == "on_same_paper") found_osp = true;
  CHECK(found_osp);
}

TEST_CASE("aggregation lands above its source") {
  Schema schema = parse_domain(
      "signature s(x::self)::extensional.\n"
      "signature base(a::s, b::s)::intensional.\n"
      "base(X,Y) :- link(X,Y).\n"
      "signature tally(a::s, n::property)::intensional.\n"
      "tally(X,N) :- s(X), N = count { Y : base(X,Y) }.\n");
  auto strata = stratify(collect_rules(schema), schema);
  REQUIRE(strata.size() == 2);
  CHECK(strata[0].predicates == std::vector<std::string>{"base"});
  CHECK(strata[1].predicates == std::vector<std::string>{"tally"});
}

TEST_CASE("negation cycle is unstratifiable") {
  Schema schema = parse_domain(
      "signature e(x::self)::extensional.\n"
      "signature p(a::e)::intensional.\n"
      "p(X) :- e(X), \\+ q(X).\n"
      "signature q(a::e)::intensional.\n"
      "q(X) :- e(X), \\+ p(X).\n");
  try {
    stratify(collect_rules(schema), schema);
    FAIL("expected UnstratifiableProgram");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnstratifiableProgram);
  }
}

TEST_CASE("positive recursion within one stratum is fine") {
  Schema schema = parse_domain(
      "signature n(x::self)::extensional.\n"
      "signature reach(a::n, b::n)::intensional.\n"
      "reach(X,Y) :- edge(X,Y).\n"
      "reach(X,Y) :- reach(X,Z), edge(Z,Y).\n");
  auto strata = stratify(collect_rules(schema), schema);
  CHECK(strata.size() == 1);

  AtomSet facts;
  facts.insert(Atom::make("n", {"a"}));
  facts.insert(Atom::make("n", {"b"}));
  facts.insert(Atom::make("n", {"c"}));
  facts.insert(Atom::make("edge", {"a", "b"}));
  facts.insert(Atom::make("edge", {"b", "c"}));
  AtomSet derived = evaluate_intensional(schema, facts);
  CHECK(derived.size() == 3);
  CHECK(derived.count(Atom::make("reach", {"a", "c"})) == 1);
}

TEST_CASE("fixture derivation matches the hand computation") {
  Schema schema = uwcse_schema();
  AtomSet derived = evaluate_intensional(schema, uwcse_atoms(schema));

  AtomSet expected;
  expected.insert(Atom::make("on_same_course", {"person21", "person211"}));
  const char* pairs[][2] = {
      {"person14", "person407"}, {"person21", "person211"},
      {"person21", "person407"}, {"person284", "person211"},
      {"person284", "person407"}, {"person45", "person211"},
  };
  for (const auto& pair : pairs) {
    expected.insert(Atom::make("on_same_paper", {pair[0], pair[1]}));
    expected.insert(Atom::make("n_common_papers", {pair[0], pair[1], "1"}));
  }
  CHECK(derived == expected);
}

TEST_CASE("semi-naive equals naive iteration") {
  Schema schema = uwcse_schema();
  AtomSet atoms = uwcse_atoms(schema);
  CHECK(evaluate_intensional(schema, atoms) ==
        oracles::naive_evaluate(schema, atoms));

  // recursive closure with negation on top
  Schema recursive = parse_domain(
      "signature n(x::self)::extensional.\n"
      "signature reach(a::n, b::n)::intensional.\n"
      "reach(X,Y) :- edge(X,Y).\n"
      "reach(X,Y) :- reach(X,Z), edge(Z,Y).\n"
      "signature unreachable(a::n, b::n)::intensional.\n"
      "unreachable(X,Y) :- n(X), n(Y), \\+ reach(X,Y).\n");
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    AtomSet facts;
    int n = 3 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i)
      facts.insert(Atom::make("n", {"v" + std::to_string(i)}));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && rng() % 3 == 0)
          facts.insert(Atom::make(
              "edge", {"v" + std::to_string(i), "v" + std::to_string(j)}));
    CHECK(evaluate_intensional(recursive, facts) ==
          oracles::naive_evaluate(recursive, facts));
  }
}

TEST_CASE("empty database derives nothing") {
  Schema schema = uwcse_schema();
  CHECK(evaluate_intensional(schema, {}).empty());
}

TEST_CASE("monotonicity for positive programs") {
  Schema schema = uwcse_schema();
  AtomSet atoms = uwcse_atoms(schema);
  AtomSet derived_full = evaluate_intensional(schema, atoms);

  // drop one publication fact: derived set must not grow
  AtomSet reduced = atoms;
  reduced.erase(Atom::make("publication", {"title25", "person21"}));
  AtomSet derived_reduced = evaluate_intensional(schema, reduced);
  for (const Atom& atom : derived_reduced) {
    if (atom.predicate == "n_common_papers") continue;  // counts can shift
    CHECK(derived_full.count(atom) == 1);
  }
}

TEST_CASE("fixpoint idempotence") {
  Schema schema = uwcse_schema();
  AtomSet atoms = uwcse_atoms(schema);
  AtomSet derived = evaluate_intensional(schema, atoms);

  // evaluating on extensional plus derived re-derives exactly the derived set
  AtomSet merged = atoms;
  merged.insert(derived.begin(), derived.end());
  CHECK(evaluate_intensional(schema, merged) == derived);
}

TEST_CASE("aggregation kinds") {
  Schema schema = parse_domain(
      "signature item(x::self, v::property)::extensional.\n"
      "signature stats(kind::property, v::property)::intensional.\n"
      "stats(lo, V) :- V = min { X : item(I, X) }.\n"
      "stats(hi, V) :- V = max { X : item(I, X) }.\n"
      "stats(total, V) :- V = sum { X : item(I, X) }.\n"
      "stats(n, V) :- V = count { I : item(I, X) }.\n");
  AtomSet facts;
  facts.insert(Atom::make("item", {"a", "3"}));
  facts.insert(Atom::make("item", {"b", "5"}));
  facts.insert(Atom::make("item", {"c", "2"}));
  AtomSet derived = evaluate_intensional(schema, facts);
  CHECK(derived.count(Atom::make("stats", {"lo", "2"})) == 1);
  CHECK(derived.count(Atom::make("stats", {"hi", "5"})) == 1);
  CHECK(derived.count(Atom::make("stats", {"total", "10"})) == 1);
  CHECK(derived.count(Atom::make("stats", {"n", "3"})) == 1);
}

TEST_CASE("min and max order symbolic values lexicographically") {
  Schema schema = parse_domain(
      "signature item(x::self, v::property)::extensional.\n"
      "signature bound(kind::property, v::property)::intensional.\n"
      "bound(lo, V) :- V = min { X : item(I, X) }.\n"
      "bound(hi, V) :- V = max { X : item(I, X) }.\n");
  AtomSet facts;
  facts.insert(Atom::make("item", {"a", "pear"}));
  facts.insert(Atom::make("item", {"b", "apple"}));
  facts.insert(Atom::make("item", {"c", "plum"}));
  AtomSet derived = evaluate_intensional(schema, facts);
  CHECK(derived.count(Atom::make("bound", {"lo", "apple"})) == 1);
  CHECK(derived.count(Atom::make("bound", {"hi", "plum"})) == 1);

  // sum over symbolic values cannot work
  Schema bad = parse_domain(
      "signature item(x::self, v::property)::extensional.\n"
      "signature t(v::property)::intensional.\n"
      "t(V) :- V = sum { X : item(I, X) }.\n");
  try {
    evaluate_intensional(bad, facts);
    FAIL("expected TypeMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TypeMismatch);
  }
}

TEST_CASE("comparisons between mixed kinds raise TypeMismatch") {
  Schema schema = parse_domain(
      "signature item(x::self, v::property)::extensional.\n"
      "signature big(a::item)::intensional.\n"
      "big(X) :- item(X, V), V > 10.\n");
  AtomSet facts;
  facts.insert(Atom::make("item", {"a", "fish"}));
  try {
    evaluate_intensional(schema, facts);
    FAIL("expected TypeMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TypeMismatch);
  }
}

TEST_CASE("arity violations raise TypeMismatch") {
  Schema schema = uwcse_schema();
  AtomSet facts;
  facts.insert(Atom::make("student", {"a", "extra"}));
  try {
    evaluate_intensional(schema, facts);
    FAIL("expected TypeMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TypeMismatch);
  }
}

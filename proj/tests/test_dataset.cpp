#include <doctest.h>

#include "relkit/datalog.hpp"
#include "relkit/dataset.hpp"
#include "relkit/error.hpp"
#include "support.hpp"

using namespace relkit;

namespace {

Schema uwcse_schema() {
  return parse_domain(testsupport::read_fixture("uwcse.domain"));
}

}  // namespace

TEST_CASE("fixture block loads every fact") {
  Schema schema = uwcse_schema();
  auto interps =
      parse_interpretations(testsupport::read_fixture("uwcse.facts"), schema);
  REQUIRE(interps.size() == 1);
  CHECK(interps[0].id == "ai");
  CHECK(interps[0].atoms.size() == 33);  // count of the fixture facts
  CHECK(interps[0].atoms.count(
            Atom::make("taught_by", {"course24", "person211", "spring_0203"})) ==
        1);
}

TEST_CASE("empty file loads no interpretations") {
  Schema schema = uwcse_schema();
  CHECK(parse_interpretations("", schema).empty());
  CHECK(parse_interpretations("% only comments\n", schema).empty());
}

TEST_CASE("arity mismatch is rejected") {
  Schema schema = uwcse_schema();
  try {
    parse_interpretations("interpretation t.\nadvised_by(a).\n", schema);
    FAIL("expected ArityMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ArityMismatch);
  }
  // undeclared predicates must stay arity-consistent too
  try {
    parse_interpretations("interpretation t.\np(a).\np(a,b).\n", schema);
    FAIL("expected ArityMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ArityMismatch);
  }
}

TEST_CASE("facts cannot list intensional relations") {
  Schema schema = uwcse_schema();
  try {
    parse_interpretations("interpretation t.\non_same_paper(a,b).\n", schema);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
  }
}

TEST_CASE("loading is deterministic") {
  Schema schema = uwcse_schema();
  std::string text = testsupport::read_fixture("uwcse.facts");
  auto a = parse_interpretations(text, schema);
  auto b = parse_interpretations(text, schema);
  REQUIRE(a.size() == b.size());
  CHECK(a[0].atoms == b[0].atoms);
}

TEST_CASE("property kinds are inferred dataset-wide") {
  Schema schema = parse_domain(
      "signature m(x::self, charge::property, element::property)"
      "::extensional.\n");
  auto interps = parse_interpretations(
      "interpretation a.\nm(a1, 0.2, c).\nm(a2, -1, n).\n"
      "interpretation b.\nm(b1, 3, o).\n",
      schema);
  auto kinds = infer_property_kinds(schema, interps);
  CHECK(kinds.kind("m", 1) == PropertyKind::Numeric);
  CHECK(kinds.kind("m", 2) == PropertyKind::Categorical);
}

TEST_CASE("mixed property kinds raise") {
  Schema schema =
      parse_domain("signature m(x::self, v::property)::extensional.\n");
  auto interps = parse_interpretations(
      "interpretation a.\nm(a1, 0.2).\nm(a2, heavy).\n", schema);
  try {
    infer_property_kinds(schema, interps);
    FAIL("expected MixedPropertyKind");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MixedPropertyKind);
  }
}

TEST_CASE("job kinds follow relational arity and property count") {
  Schema schema = parse_domain(
      "signature page(id::self, category::property)::extensional.\n"
      "signature rating(id::self)::extensional.\n"
      "signature linked(a::page, b::page)::extensional.\n"
      "signature score(p::page, s::property)::extensional.\n"
      "signature active::extensional.\n"
      "signature halflife(h::property)::extensional.\n");
  auto interps = parse_interpretations(
      "interpretation w.\n"
      "page(p1, course). rating(r1).\n"
      "linked(p1, p1). score(p1, 0.5). active. halflife(2.5).\n",
      schema);
  auto kinds = infer_property_kinds(schema, interps);

  auto expect_kind = [&](const std::string& target, TaskKind kind) {
    auto tasks = expand_job(schema, kinds, Job{{target}});
    REQUIRE(tasks.size() == 1);
    CHECK(tasks[0].kind == kind);
  };
  expect_kind("active", TaskKind::BinaryInterpretation);
  expect_kind("halflife", TaskKind::RegressionInterpretation);
  expect_kind("linked", TaskKind::LinkPrediction);
  expect_kind("score", TaskKind::RegressionEntity);

  // multitask: several targets expand to independent tasks
  auto tasks = expand_job(schema, kinds, Job{{"active", "halflife"}});
  CHECK(tasks.size() == 2);

  CHECK_THROWS_AS(expand_job(schema, kinds, Job{{"absent"}}), Error);
}

TEST_CASE("partition splits outputs from inputs") {
  Schema schema = uwcse_schema();
  auto interps =
      parse_interpretations(testsupport::read_fixture("uwcse.facts"), schema);
  Interpretation interp = interps[0];
  AtomSet derived = evaluate_intensional(schema, interp.atoms);
  interp.atoms.insert(derived.begin(), derived.end());

  // no intensional rule mentions advised_by, so y is exactly its atoms
  Partition p = infer_partition(schema, Job{{"advised_by"}}, interp);
  CHECK(p.y.size() == 2);
  for (const Atom& atom : p.y) CHECK(atom.predicate == "advised_by");
  CHECK(p.x.size() + p.y.size() == interp.atoms.size());
  for (const Atom& atom : p.x) CHECK(p.y.count(atom) == 0);
}

TEST_CASE("dependent intensional relations join the output side") {
  Schema schema = parse_domain(
      "signature s(x::self)::extensional.\n"
      "signature p(x::self)::extensional.\n"
      "signature advised_by(a::s, b::p)::extensional.\n"
      "signature coadvised(a::s, b::s)::intensional.\n"
      "coadvised(A,B) :- advised_by(A,P), advised_by(B,P).\n");
  AtomSet atoms;
  atoms.insert(Atom::make("s", {"s1"}));
  atoms.insert(Atom::make("s", {"s2"}));
  atoms.insert(Atom::make("p", {"p1"}));
  atoms.insert(Atom::make("advised_by", {"s1", "p1"}));
  atoms.insert(Atom::make("advised_by", {"s2", "p1"}));
  AtomSet derived = evaluate_intensional(schema, atoms);
  atoms.insert(derived.begin(), derived.end());

  Partition p =
      infer_partition(schema, Job{{"advised_by"}}, Interpretation{"i", atoms});
  CHECK(p.y.count(Atom::make("coadvised", {"s1", "s2"})) == 1);
  CHECK(p.y.count(Atom::make("advised_by", {"s1", "p1"})) == 1);
  for (const Atom& atom : p.x) CHECK(atom.predicate != "coadvised");
}

TEST_CASE("zero-arity target keeps presence semantics") {
  Schema schema = parse_domain(
      "signature atom(x::self)::extensional.\n"
      "signature mutagenic::extensional.\n");
  AtomSet with;
  with.insert(Atom::make("atom", {"a1"}));
  with.insert(Atom::make("mutagenic"));
  Partition p =
      infer_partition(schema, Job{{"mutagenic"}}, Interpretation{"m1", with});
  CHECK(p.y.size() == 1);

  AtomSet without;
  without.insert(Atom::make("atom", {"a1"}));
  Partition q = infer_partition(schema, Job{{"mutagenic"}},
                                Interpretation{"m2", without});
  CHECK(q.y.empty());
}

TEST_CASE("slices partition atoms with a total order") {
  Schema schema = parse_domain(
      "signature movie(m::self, year::property)::extensional.\n"
      "signature person(p::self)::extensional.\n"
      "signature acted_in(p::person, m::movie)::extensional.\n"
      "signature blockbuster(m::movie)::extensional.\n");
  auto interps = parse_interpretations(
      "interpretation imdb.\n"
      "movie(m1, 1995). movie(m2, 1996). movie(m3, 1996).\n"
      "person(a1). person(a2).\n"
      "acted_in(a1, m1). acted_in(a1, m2). acted_in(a2, m3).\n"
      "blockbuster(m2).\n",
      schema);
  SliceSystem slices = build_slices(schema, interps[0], "movie", "year");
  REQUIRE(slices.keys.size() == 2);
  CHECK(slices.keys[0].text == "1995");
  CHECK(slices.keys[1].text == "1996");

  // every atom in exactly one slice
  size_t assigned = 0;
  for (size_t s = 0; s < slices.keys.size(); ++s)
    assigned += slices.atoms_of(s).size();
  CHECK(assigned == interps[0].atoms.size());

  // persons inherit their earliest movie's key
  CHECK(slices.assignment.at(Atom::make("person", {"a1"})) == 0);
  CHECK(slices.assignment.at(Atom::make("person", {"a2"})) == 1);
  CHECK(slices.assignment.at(Atom::make("blockbuster", {"m2"})) == 1);

  // train/test frame split: all train keys precede the test key
  AtomSet before = slices.atoms_up_to(1, false);
  AtomSet test = slices.atoms_of(1);
  for (const Atom& atom : test) CHECK(before.count(atom) == 0);
}

TEST_CASE("single-slice system holds every atom") {
  Schema schema = parse_domain(
      "signature movie(m::self, year::property)::extensional.\n");
  auto interps = parse_interpretations(
      "interpretation one.\nmovie(m1, 2000). movie(m2, 2000).\n", schema);
  SliceSystem slices = build_slices(schema, interps[0], "movie", "year");
  CHECK(slices.keys.size() == 1);
  CHECK(slices.atoms_of(0).size() == 2);
}

TEST_CASE("unorderable slice keys raise") {
  Schema schema = parse_domain(
      "signature movie(m::self, year::property)::extensional.\n"
      "signature tag(m::movie)::extensional.\n");
  auto interps = parse_interpretations(
      "interpretation bad.\nmovie(m1, 1995). movie(m2, old).\n", schema);
  // mixed numeric/symbolic keys
  CHECK_THROWS_AS(build_slices(schema, interps[0], "movie", "year"), Error);
  // keying by a non-property column
  auto good = parse_interpretations("interpretation g.\nmovie(m1, 1995).\n",
                                    schema);
  CHECK_THROWS_AS(build_slices(schema, good[0], "movie", "m"), Error);
  CHECK_THROWS_AS(build_slices(schema, good[0], "tag", "m"), Error);
}

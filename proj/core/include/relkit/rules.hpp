#pragma once

#include <memory>
#include <string>
#include <vector>

#include "relkit/atom.hpp"

namespace relkit {

/// A term in a rule: either a variable (Prolog convention, leading uppercase
/// or underscore) or a ground constant.
struct Term {
  bool is_var = false;
  std::string var;
  Constant constant;

  static Term make_var(std::string name) {
    Term t;
    t.is_var = true;
    t.var = std::move(name);
    return t;
  }
  static Term make_const(Constant c) {
    Term t;
    t.constant = std::move(c);
    return t;
  }
  std::string to_string() const { return is_var ? var : constant.text; }
  bool operator==(const Term&) const = default;
};

struct AtomPattern {
  std::string predicate;
  std::vector<Term> args;

  std::string to_string() const;
  bool operator==(const AtomPattern&) const = default;
};

enum class Cmp { Eq, Ne, Lt, Gt, Le, Ge };

const char* cmp_symbol(Cmp op);

struct Comparison {
  Cmp op = Cmp::Eq;
  Term lhs;
  Term rhs;
  bool operator==(const Comparison&) const = default;
};

enum class AggKind { Count, Min, Max, Sum };

const char* agg_kind_name(AggKind kind);

struct Aggregation;

struct Literal {
  enum class Kind { Atom, NegatedAtom, Compare, Aggregate };
  Kind kind = Kind::Atom;
  AtomPattern atom;                      // Atom / NegatedAtom
  Comparison cmp;                        // Compare
  std::shared_ptr<const Aggregation> agg;  // Aggregate

  std::string to_string() const;
};

/// `Result = kind { V1,...,Vk : conjunction }`. The solutions of the
/// conjunction are collected as distinct tuples over (V1,...,Vk); count is
/// their number, min/max/sum aggregate the numeric value of V1. An empty
/// solution set fails the literal (the setof idiom), so no atom is derived
/// for empty groups.
struct Aggregation {
  AggKind kind = AggKind::Count;
  std::string result_var;
  std::vector<std::string> vars;  // aggregated tuple template
  std::vector<Literal> body;      // no nested aggregations
};

struct Rule {
  AtomPattern head;
  std::vector<Literal> body;

  std::string to_string() const;
};

}  // namespace relkit

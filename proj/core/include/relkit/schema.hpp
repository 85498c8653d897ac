#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "relkit/error.hpp"
#include "relkit/rules.hpp"

namespace relkit {

enum class ColumnKind { EntityRef, Property, SelfRef };
enum class Level { Extensional, Intensional };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Property;
  std::string entity;  // referenced entity set, EntityRef only
  std::string role;    // defaults to the 1-based position as decimal text
  bool role_explicit = false;

  bool is_identifier() const { return kind != ColumnKind::Property; }
};

struct Signature {
  std::string name;
  std::vector<Column> columns;
  Level level = Level::Extensional;
  std::vector<Rule> rules;  // clauses following an intensional header
  bool is_kernel_point = false;
  bool is_target = false;

  /// E-relations declare an entity set via a single `self` column.
  bool is_entity() const;
  /// Number of identifier (non-property) columns.
  int relational_arity() const;
  std::vector<int> identifier_columns() const;
  std::vector<int> property_columns() const;
};

struct Schema {
  std::vector<Signature> signatures;

  const Signature* find(std::string_view name) const;
  Signature* find(std::string_view name);
  std::vector<std::string> entity_sets() const;
  bool declares(std::string_view predicate) const {
    return find(predicate) != nullptr;
  }
};

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  ErrorKind kind = ErrorKind::SyntaxError;
  std::string signature;
  std::string message;
};

/// Parses one domain file. The begin_domain. / end_domain. markers are
/// optional; when present, only the enclosed declarations are read.
/// Intensional headers are followed by their rule clauses. Throws Error on
/// the first syntactic or structural violation.
Schema parse_domain(std::string_view text);

/// Structural checks on an already-built Schema; empty result means all
/// invariants hold. parse_domain runs this internally and throws on errors.
std::vector<Diagnostic> validate_schema(const Schema& schema);

/// Canonical form: one header per signature, default roles elided, rules
/// printed one per line. parse(pretty_print(s)) is a fixed point.
std::string pretty_print(const Schema& schema);

/// Marks the named signatures as kernel points. Unknown names throw
/// UnknownTarget-style errors through the Error type.
void set_kernel_points(Schema& schema, const std::vector<std::string>& names);

}  // namespace relkit

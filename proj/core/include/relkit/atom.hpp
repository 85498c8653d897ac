#pragma once

#include <compare>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace relkit {

/// A ground constant. The source spelling is kept verbatim so datasets and
/// derived atoms round-trip byte-exactly; `value` is meaningful only when
/// `numeric` is true.
struct Constant {
  std::string text;
  bool numeric = false;
  double value = 0.0;

  Constant() = default;
  explicit Constant(std::string_view s) { *this = parse(s); }

  /// A constant is numeric iff the whole token parses as a decimal number.
  static Constant parse(std::string_view s);
  static Constant from_number(double v);

  bool operator==(const Constant& o) const { return text == o.text; }
  std::strong_ordering operator<=>(const Constant& o) const {
    return text <=> o.text;
  }
};

/// Shortest decimal form of `v` that parses back to the same double.
std::string format_number(double v);

struct Atom {
  std::string predicate;
  std::vector<Constant> args;

  Atom() = default;
  Atom(std::string pred, std::vector<Constant> a)
      : predicate(std::move(pred)), args(std::move(a)) {}

  /// Convenience for tests and fixtures: args parsed from plain strings.
  static Atom make(std::string_view pred,
                   std::initializer_list<std::string_view> a = {});

  std::string to_string() const;  // pred(c1,...,cn) or bare pred

  bool operator==(const Atom& o) const = default;
  auto operator<=>(const Atom& o) const = default;
};

using AtomSet = std::set<Atom>;

}  // namespace relkit

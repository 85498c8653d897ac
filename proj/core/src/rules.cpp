#include "relkit/rules.hpp"

namespace relkit {

const char* cmp_symbol(Cmp op) {
  switch (op) {
    case Cmp::Eq: return "=";
    case Cmp::Ne: return "\\=";
    case Cmp::Lt: return "<";
    case Cmp::Gt: return ">";
    case Cmp::Le: return "=<";
    case Cmp::Ge: return ">=";
  }
  return "?";
}

const char* agg_kind_name(AggKind kind) {
  switch (kind) {
    case AggKind::Count: return "count";
    case AggKind::Min: return "min";
    case AggKind::Max: return "max";
    case AggKind::Sum: return "sum";
  }
  return "?";
}

std::string AtomPattern::to_string() const {
  if (args.empty()) return predicate;
  std::string out = predicate;
  out += '(';
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ',';
    out += args[i].to_string();
  }
  out += ')';
  return out;
}

std::string Literal::to_string() const {
  switch (kind) {
    case Kind::Atom:
      return atom.to_string();
    case Kind::NegatedAtom:
      return "\\+ " + atom.to_string();
    case Kind::Compare:
      return cmp.lhs.to_string() + " " + cmp_symbol(cmp.op) + " " +
             cmp.rhs.to_string();
    case Kind::Aggregate: {
      std::string out = agg->result_var;
      out += " = ";
      out += agg_kind_name(agg->kind);
      out += " { ";
      for (size_t i = 0; i < agg->vars.size(); ++i) {
        if (i) out += ',';
        out += agg->vars[i];
      }
      out += " : ";
      for (size_t i = 0; i < agg->body.size(); ++i) {
        if (i) out += ", ";
        out += agg->body[i].to_string();
      }
      out += " }";
      return out;
    }
  }
  return "";
}

std::string Rule::to_string() const {
  std::string out = head.to_string();
  if (!body.empty()) {
    out += " :- ";
    for (size_t i = 0; i < body.size(); ++i) {
      if (i) out += ", ";
      out += body[i].to_string();
    }
  }
  out += '.';
  return out;
}

}  // namespace relkit

#include "relkit/schema.hpp"

#include <cctype>
#include <map>
#include <set>

namespace relkit {

bool Signature::is_entity() const {
  for (const auto& c : columns)
    if (c.kind == ColumnKind::SelfRef) return true;
  return false;
}

int Signature::relational_arity() const {
  int n = 0;
  for (const auto& c : columns)
    if (c.is_identifier()) ++n;
  return n;
}

std::vector<int> Signature::identifier_columns() const {
  std::vector<int> out;
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i].is_identifier()) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> Signature::property_columns() const {
  std::vector<int> out;
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i].kind == ColumnKind::Property) out.push_back(static_cast<int>(i));
  return out;
}

const Signature* Schema::find(std::string_view name) const {
  for (const auto& s : signatures)
    if (s.name == name) return &s;
  return nullptr;
}

Signature* Schema::find(std::string_view name) {
  for (auto& s : signatures)
    if (s.name == name) return &s;
  return nullptr;
}

std::vector<std::string> Schema::entity_sets() const {
  std::vector<std::string> out;
  for (const auto& s : signatures)
    if (s.is_entity()) out.push_back(s.name);
  return out;
}

namespace {

enum class Tok {
  Ident,     // lowercase-start
  Var,       // uppercase or underscore-start
  Number,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Dot,
  DoubleColon,
  Colon,
  At,
  Implies,   // :-
  Naf,       // \+
  Eq,
  Ne,        // \=
  Lt,
  Gt,
  Le,        // =<
  Ge,        // >=
  End,
};

struct Token {
  Tok tok;
  std::string text;
  int line;
  int col;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }
  Token next() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws();
    current_.line = line_;
    current_.col = col_;
    if (pos_ >= src_.size()) {
      current_ = {Tok::End, "", line_, col_};
      return;
    }
    char c = src_[pos_];
    if (std::islower(static_cast<unsigned char>(c))) {
      current_ = {Tok::Ident, take_word(), current_.line, current_.col};
      return;
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      current_ = {Tok::Var, take_word(), current_.line, current_.col};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      current_ = {Tok::Number, take_number(), current_.line, current_.col};
      return;
    }
    switch (c) {
      case '(': single(Tok::LParen, "("); return;
      case ')': single(Tok::RParen, ")"); return;
      case '{': single(Tok::LBrace, "{"); return;
      case '}': single(Tok::RBrace, "}"); return;
      case ',': single(Tok::Comma, ","); return;
      case '.': single(Tok::Dot, "."); return;
      case '@': single(Tok::At, "@"); return;
      case ':':
        if (la(1) == ':') { dbl(Tok::DoubleColon, "::"); return; }
        if (la(1) == '-') { dbl(Tok::Implies, ":-"); return; }
        single(Tok::Colon, ":");
        return;
      case '\\':
        if (la(1) == '+') { dbl(Tok::Naf, "\\+"); return; }
        if (la(1) == '=') { dbl(Tok::Ne, "\\="); return; }
        break;
      case '=':
        if (la(1) == '<') { dbl(Tok::Le, "=<"); return; }
        single(Tok::Eq, "=");
        return;
      case '<': single(Tok::Lt, "<"); return;
      case '>':
        if (la(1) == '=') { dbl(Tok::Ge, ">="); return; }
        single(Tok::Gt, ">");
        return;
      default: break;
    }
    throw Error(ErrorKind::SyntaxError,
                std::string("unexpected character '") + c + "'", line_, col_);
  }

  char la(size_t k) const {
    return pos_ + k < src_.size() ? src_[pos_ + k] : '\0';
  }

  void single(Tok t, const char* s) {
    current_ = {t, s, current_.line, current_.col};
    bump();
  }
  void dbl(Tok t, const char* s) {
    current_ = {t, s, current_.line, current_.col};
    bump();
    bump();
  }

  void bump() {
    if (pos_ < src_.size()) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_ws() {
    for (;;) {
      while (pos_ < src_.size() &&
             std::isspace(static_cast<unsigned char>(src_[pos_])))
        bump();
      if (pos_ < src_.size() && src_[pos_] == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
        continue;
      }
      return;
    }
  }

  std::string take_word() {
    size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_'))
      bump();
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string take_number() {
    size_t start = pos_;
    if (src_[pos_] == '-') bump();
    while (pos_ < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_])))
      bump();
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      bump();
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        bump();
    }
    // exponent part, e.g. 1.5e-3
    if (pos_ + 1 < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      size_t save = pos_;
      bump();
      if (src_[pos_] == '+' || src_[pos_] == '-') bump();
      if (pos_ < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_])))
          bump();
      } else {
        pos_ = save;  // bare 'e' belongs to the next token
      }
    }
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token current_{Tok::End, "", 1, 1};
};

class DomainParser {
 public:
  explicit DomainParser(std::string_view text) : lex_(text) {}

  Schema parse() {
    Schema schema;
    if (at_ident("begin_domain")) {
      lex_.next();
      expect(Tok::Dot, "'.'");
    }
    while (lex_.peek().tok != Tok::End && !at_ident("end_domain")) {
      if (!at_ident("signature")) {
        throw err("expected 'signature'");
      }
      lex_.next();
      schema.signatures.push_back(parse_signature());
      Signature& sig = schema.signatures.back();
      while (lex_.peek().tok != Tok::End && !at_ident("signature") &&
             !at_ident("end_domain")) {
        sig.rules.push_back(parse_rule());
      }
    }
    if (at_ident("end_domain")) {
      lex_.next();
      expect(Tok::Dot, "'.'");
    }
    return schema;
  }

 private:
  bool at_ident(std::string_view word) const {
    return lex_.peek().tok == Tok::Ident && lex_.peek().text == word;
  }

  Error err(const std::string& message) const {
    return Error(ErrorKind::SyntaxError,
                 message + ", found '" + lex_.peek().text + "'",
                 lex_.peek().line, lex_.peek().col);
  }

  Token expect(Tok tok, const char* what) {
    if (lex_.peek().tok != tok) throw err(std::string("expected ") + what);
    return lex_.next();
  }

  Signature parse_signature() {
    Signature sig;
    sig.name = expect(Tok::Ident, "signature name").text;
    if (lex_.peek().tok == Tok::LParen) {
      lex_.next();
      for (;;) {
        sig.columns.push_back(parse_column(sig.columns.size() + 1));
        if (lex_.peek().tok == Tok::Comma) {
          lex_.next();
          continue;
        }
        break;
      }
      expect(Tok::RParen, "')'");
    }
    expect(Tok::DoubleColon, "'::'");
    Token level = expect(Tok::Ident, "'extensional' or 'intensional'");
    if (level.text == "extensional") {
      sig.level = Level::Extensional;
    } else if (level.text == "intensional") {
      sig.level = Level::Intensional;
    } else {
      throw Error(ErrorKind::SyntaxError,
                  "expected 'extensional' or 'intensional', found '" +
                      level.text + "'",
                  level.line, level.col);
    }
    expect(Tok::Dot, "'.'");
    return sig;
  }

  Column parse_column(size_t position) {
    Column col;
    col.name = expect(Tok::Ident, "column name").text;
    col.role = std::to_string(position);
    if (lex_.peek().tok == Tok::At) {
      lex_.next();
      col.role = expect(Tok::Ident, "role name").text;
      col.role_explicit = true;
    }
    expect(Tok::DoubleColon, "'::'");
    Token type = expect(Tok::Ident, "column type");
    if (type.text == "self") {
      col.kind = ColumnKind::SelfRef;
    } else if (type.text == "property") {
      col.kind = ColumnKind::Property;
    } else {
      col.kind = ColumnKind::EntityRef;
      col.entity = type.text;
    }
    return col;
  }

  Term parse_term() {
    const Token& t = lex_.peek();
    if (t.tok == Tok::Var) {
      std::string name = lex_.next().text;
      if (name == "_") name = "_G" + std::to_string(fresh_++);
      return Term::make_var(std::move(name));
    }
    if (t.tok == Tok::Ident || t.tok == Tok::Number) {
      return Term::make_const(Constant::parse(lex_.next().text));
    }
    throw err("expected term");
  }

  AtomPattern parse_atom_pattern() {
    AtomPattern atom;
    atom.predicate = expect(Tok::Ident, "predicate name").text;
    if (lex_.peek().tok == Tok::LParen) {
      lex_.next();
      for (;;) {
        atom.args.push_back(parse_term());
        if (lex_.peek().tok == Tok::Comma) {
          lex_.next();
          continue;
        }
        break;
      }
      expect(Tok::RParen, "')'");
    }
    return atom;
  }

  static Cmp cmp_of(Tok tok) {
    switch (tok) {
      case Tok::Eq: return Cmp::Eq;
      case Tok::Ne: return Cmp::Ne;
      case Tok::Lt: return Cmp::Lt;
      case Tok::Gt: return Cmp::Gt;
      case Tok::Le: return Cmp::Le;
      case Tok::Ge: return Cmp::Ge;
      default: return Cmp::Eq;
    }
  }

  static bool is_cmp(Tok tok) {
    return tok == Tok::Eq || tok == Tok::Ne || tok == Tok::Lt ||
           tok == Tok::Gt || tok == Tok::Le || tok == Tok::Ge;
  }

  static AggKind agg_kind_of(const std::string& word) {
    if (word == "count") return AggKind::Count;
    if (word == "min") return AggKind::Min;
    if (word == "max") return AggKind::Max;
    return AggKind::Sum;
  }

  static bool is_agg_word(const std::string& word) {
    return word == "count" || word == "min" || word == "max" || word == "sum";
  }

  Literal parse_literal(bool inside_aggregation) {
    Literal lit;
    if (lex_.peek().tok == Tok::Naf) {
      lex_.next();
      lit.kind = Literal::Kind::NegatedAtom;
      lit.atom = parse_atom_pattern();
      return lit;
    }
    if (lex_.peek().tok == Tok::Var) {
      Term lhs = parse_term();
      if (!is_cmp(lex_.peek().tok))
        throw err("expected comparison operator after variable");
      Tok op = lex_.next().tok;
      if (op == Tok::Eq && lex_.peek().tok == Tok::Ident &&
          is_agg_word(lex_.peek().text)) {
        // lookahead for `Var = kind {` vs a comparison against a constant
        Token kw = lex_.next();
        if (lex_.peek().tok == Tok::LBrace) {
          if (inside_aggregation)
            throw Error(ErrorKind::SyntaxError,
                        "aggregations cannot be nested", kw.line, kw.col);
          return parse_aggregation(lhs.var, agg_kind_of(kw.text));
        }
        lit.kind = Literal::Kind::Compare;
        lit.cmp = {Cmp::Eq, lhs, Term::make_const(Constant::parse(kw.text))};
        return lit;
      }
      lit.kind = Literal::Kind::Compare;
      lit.cmp = {cmp_of(op), lhs, parse_term()};
      return lit;
    }
    if (lex_.peek().tok == Tok::Number) {
      Term lhs = parse_term();
      if (!is_cmp(lex_.peek().tok))
        throw err("expected comparison operator after number");
      Tok op = lex_.next().tok;
      lit.kind = Literal::Kind::Compare;
      lit.cmp = {cmp_of(op), lhs, parse_term()};
      return lit;
    }
    // identifier: either an atom or a comparison whose lhs is a constant
    AtomPattern atom = parse_atom_pattern();
    if (atom.args.empty() && is_cmp(lex_.peek().tok)) {
      Tok op = lex_.next().tok;
      lit.kind = Literal::Kind::Compare;
      lit.cmp = {cmp_of(op), Term::make_const(Constant::parse(atom.predicate)),
                 parse_term()};
      return lit;
    }
    lit.kind = Literal::Kind::Atom;
    lit.atom = std::move(atom);
    return lit;
  }

  Literal parse_aggregation(std::string result_var, AggKind kind) {
    expect(Tok::LBrace, "'{'");
    auto agg = std::make_shared<Aggregation>();
    agg->kind = kind;
    agg->result_var = std::move(result_var);
    for (;;) {
      Token v = expect(Tok::Var, "aggregation variable");
      agg->vars.push_back(v.text);
      if (lex_.peek().tok == Tok::Comma) {
        lex_.next();
        continue;
      }
      break;
    }
    expect(Tok::Colon, "':'");
    for (;;) {
      agg->body.push_back(parse_literal(/*inside_aggregation=*/true));
      if (lex_.peek().tok == Tok::Comma) {
        lex_.next();
        continue;
      }
      break;
    }
    expect(Tok::RBrace, "'}'");
    Literal lit;
    lit.kind = Literal::Kind::Aggregate;
    lit.agg = std::move(agg);
    return lit;
  }

  Rule parse_rule() {
    Rule rule;
    rule.head = parse_atom_pattern();
    if (lex_.peek().tok == Tok::Implies) {
      lex_.next();
      for (;;) {
        rule.body.push_back(parse_literal(/*inside_aggregation=*/false));
        if (lex_.peek().tok == Tok::Comma) {
          lex_.next();
          continue;
        }
        break;
      }
    }
    expect(Tok::Dot, "'.'");
    return rule;
  }

  Lexer lex_;
  int fresh_ = 0;
};

void check_rule_safety(const Signature& sig, const Rule& rule,
                       std::vector<Diagnostic>& out) {
  auto diag = [&](const std::string& message) {
    out.push_back({Diagnostic::Severity::Error, ErrorKind::SyntaxError,
                   sig.name, "in rule '" + rule.to_string() + "': " + message});
  };

  std::set<std::string> bound;
  auto bind_atom_vars = [&](const AtomPattern& atom,
                            std::set<std::string>& env) {
    for (const auto& t : atom.args)
      if (t.is_var) env.insert(t.var);
  };
  auto is_bound = [](const std::set<std::string>& env, const Term& t) {
    return !t.is_var || env.count(t.var) > 0;
  };

  auto check_body = [&](const std::vector<Literal>& body,
                        std::set<std::string>& env) {
    for (const auto& lit : body) {
      switch (lit.kind) {
        case Literal::Kind::Atom:
          bind_atom_vars(lit.atom, env);
          break;
        case Literal::Kind::NegatedAtom:
          for (const auto& t : lit.atom.args)
            if (t.is_var && !env.count(t.var))
              diag("variable " + t.var +
                   " in negated literal is not bound by an earlier positive "
                   "literal");
          break;
        case Literal::Kind::Compare:
          if (lit.cmp.op == Cmp::Eq) {
            if (is_bound(env, lit.cmp.lhs) || is_bound(env, lit.cmp.rhs)) {
              if (lit.cmp.lhs.is_var) env.insert(lit.cmp.lhs.var);
              if (lit.cmp.rhs.is_var) env.insert(lit.cmp.rhs.var);
            } else {
              diag("'=' with both sides unbound");
            }
          } else {
            if (!is_bound(env, lit.cmp.lhs) || !is_bound(env, lit.cmp.rhs))
              diag("comparison over unbound variable");
          }
          break;
        case Literal::Kind::Aggregate: {
          const Aggregation& agg = *lit.agg;
          if (env.count(agg.result_var))
            diag("aggregation result " + agg.result_var +
                 " is already bound in the body");
          std::set<std::string> inner = env;
          for (const auto& inner_lit : agg.body) {
            if (inner_lit.kind == Literal::Kind::Atom) {
              bind_atom_vars(inner_lit.atom, inner);
            } else if (inner_lit.kind == Literal::Kind::NegatedAtom) {
              for (const auto& t : inner_lit.atom.args)
                if (t.is_var && !inner.count(t.var))
                  diag("variable " + t.var +
                       " in negated literal is not bound");
            } else if (inner_lit.kind == Literal::Kind::Compare) {
              if (inner_lit.cmp.op == Cmp::Eq) {
                if (inner_lit.cmp.lhs.is_var) inner.insert(inner_lit.cmp.lhs.var);
                if (inner_lit.cmp.rhs.is_var) inner.insert(inner_lit.cmp.rhs.var);
              }
            }
          }
          for (const auto& v : agg.vars)
            if (!inner.count(v))
              diag("aggregated variable " + v +
                   " is not bound inside the aggregation");
          env.insert(agg.result_var);
          break;
        }
      }
    }
  };

  check_body(rule.body, bound);
  for (const auto& t : rule.head.args)
    if (t.is_var && !bound.count(t.var))
      diag("head variable " + t.var + " is not range-restricted");
}

}  // namespace

std::vector<Diagnostic> validate_schema(const Schema& schema) {
  std::vector<Diagnostic> out;
  std::set<std::string> seen;
  std::set<std::string> entities;
  for (const auto& sig : schema.signatures)
    if (sig.is_entity()) entities.insert(sig.name);

  for (const auto& sig : schema.signatures) {
    if (!seen.insert(sig.name).second)
      out.push_back({Diagnostic::Severity::Error,
                     ErrorKind::DuplicateSignature, sig.name,
                     "signature '" + sig.name + "' declared more than once"});

    int self_count = 0;
    for (const auto& col : sig.columns) {
      if (col.kind == ColumnKind::SelfRef) ++self_count;
      if (col.kind == ColumnKind::Property && col.role_explicit)
        out.push_back({Diagnostic::Severity::Error, ErrorKind::RoleOnProperty,
                       sig.name,
                       "role '" + col.role + "' on property column '" +
                           col.name + "'"});
      if (col.kind == ColumnKind::EntityRef && !entities.count(col.entity))
        out.push_back({Diagnostic::Severity::Error,
                       ErrorKind::UnknownEntityType, sig.name,
                       "column '" + col.name + "' references '" + col.entity +
                           "', which is not a declared entity set"});
    }
    if (self_count > 1)
      out.push_back({Diagnostic::Severity::Error, ErrorKind::MultipleSelfRef,
                     sig.name, "more than one self column"});
    if (self_count == 1 && sig.relational_arity() != 1)
      out.push_back({Diagnostic::Severity::Error, ErrorKind::MultipleSelfRef,
                     sig.name,
                     "entity signature must have relational arity 1"});

    if (sig.level == Level::Extensional && !sig.rules.empty())
      out.push_back({Diagnostic::Severity::Error, ErrorKind::SyntaxError,
                     sig.name,
                     "extensional signature carries rule clauses"});

    for (const auto& rule : sig.rules) {
      if (const Signature* head = schema.find(rule.head.predicate)) {
        if (head->level == Level::Extensional)
          out.push_back({Diagnostic::Severity::Error, ErrorKind::SyntaxError,
                         sig.name,
                         "rule head '" + rule.head.predicate +
                             "' is a declared extensional signature"});
        if (rule.head.args.size() != head->columns.size())
          out.push_back({Diagnostic::Severity::Error,
                         ErrorKind::ArityMismatch, sig.name,
                         "rule head '" + rule.head.to_string() + "' has " +
                             std::to_string(rule.head.args.size()) +
                             " arguments, signature declares " +
                             std::to_string(head->columns.size())});
      }
      check_rule_safety(sig, rule, out);
    }
  }
  return out;
}

Schema parse_domain(std::string_view text) {
  DomainParser parser(text);
  Schema schema = parser.parse();
  auto diagnostics = validate_schema(schema);
  for (const auto& d : diagnostics)
    if (d.severity == Diagnostic::Severity::Error)
      throw Error(d.kind, d.message);
  return schema;
}

std::string pretty_print(const Schema& schema) {
  std::string out = "begin_domain.\n";
  for (const auto& sig : schema.signatures) {
    out += "signature ";
    out += sig.name;
    if (!sig.columns.empty()) {
      out += '(';
      for (size_t i = 0; i < sig.columns.size(); ++i) {
        const Column& col = sig.columns[i];
        if (i) out += ", ";
        out += col.name;
        if (col.role_explicit) {
          out += '@';
          out += col.role;
        }
        out += "::";
        switch (col.kind) {
          case ColumnKind::SelfRef: out += "self"; break;
          case ColumnKind::Property: out += "property"; break;
          case ColumnKind::EntityRef: out += col.entity; break;
        }
      }
      out += ')';
    }
    out += "::";
    out += sig.level == Level::Extensional ? "extensional" : "intensional";
    out += ".\n";
    for (const auto& rule : sig.rules) {
      out += rule.to_string();
      out += '\n';
    }
  }
  out += "end_domain.\n";
  return out;
}

void set_kernel_points(Schema& schema, const std::vector<std::string>& names) {
  for (const auto& name : names) {
    Signature* sig = schema.find(name);
    if (!sig)
      throw Error(ErrorKind::UnknownTarget,
                  "kernel point signature '" + name + "' is not declared");
    sig->is_kernel_point = true;
  }
}

}  // namespace relkit

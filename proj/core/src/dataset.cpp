#include "relkit/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "relkit/error.hpp"

namespace relkit {

namespace {

// Fact files are a flat token stream: atoms terminated by '.', with
// `interpretation <id>.` opening a new block. Layout is free-form.
class FactScanner {
 public:
  explicit FactScanner(std::string_view src) : src_(src) {}

  std::vector<Interpretation> scan(const Schema& schema) {
    std::vector<Interpretation> out;
    Interpretation* current = nullptr;
    std::set<std::string> seen_ids;
    for (;;) {
      skip_ws();
      if (pos_ >= src_.size()) break;
      std::string head = token();
      if (head == "interpretation") {
        // header form: interpretation <id>.
        std::string id = token();
        expect('.');
        if (!seen_ids.insert(id).second)
          throw Error(ErrorKind::ParseError,
                      "duplicate interpretation id '" + id + "'", line_);
        out.push_back({id, {}});
        current = &out.back();
        continue;
      }
      Atom atom = parse_atom(std::move(head));
      if (!current)
        throw Error(ErrorKind::ParseError,
                    "ground atom before any 'interpretation <id>.' header",
                    line_);
      check_arity(schema, atom);
      current->atoms.insert(std::move(atom));
    }
    return out;
  }

 private:
  void check_arity(const Schema& schema, const Atom& atom) {
    size_t expected;
    if (const Signature* sig = schema.find(atom.predicate)) {
      if (sig->level == Level::Intensional)
        throw Error(ErrorKind::ParseError,
                    "fact '" + atom.to_string() +
                        "' listed for intensional signature",
                    line_);
      expected = sig->columns.size();
    } else {
      auto it = undeclared_arity_.find(atom.predicate);
      if (it == undeclared_arity_.end()) {
        undeclared_arity_[atom.predicate] = atom.args.size();
        return;
      }
      expected = it->second;
    }
    if (atom.args.size() != expected)
      throw Error(ErrorKind::ArityMismatch,
                  "atom '" + atom.to_string() + "' has arity " +
                      std::to_string(atom.args.size()) + ", expected " +
                      std::to_string(expected),
                  line_);
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

  void bump() {
    if (src_[pos_] == '\n') ++line_;
    ++pos_;
  }

  std::string token() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
          c == '-' || c == '+' ||
          (c == '.' && pos_ + 1 < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))))
        bump();
      else
        break;
    }
    if (start == pos_)
      throw Error(ErrorKind::ParseError,
                  std::string("unexpected character '") +
                      (pos_ < src_.size() ? std::string(1, src_[pos_])
                                          : std::string("<eof>")) +
                      "'",
                  line_);
    return std::string(src_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= src_.size() || src_[pos_] != c)
      throw Error(ErrorKind::ParseError,
                  std::string("expected '") + c + "'", line_);
    bump();
  }

  Atom parse_atom(std::string predicate) {
    Atom atom;
    atom.predicate = std::move(predicate);
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      bump();
      for (;;) {
        atom.args.push_back(Constant::parse(token()));
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == ',') {
          bump();
          continue;
        }
        break;
      }
      expect(')');
    }
    expect('.');
    return atom;
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, size_t> undeclared_arity_;
};

}  // namespace

PropertyKindTable infer_property_kinds(
    const Schema& schema, const std::vector<Interpretation>& interps) {
  // (signature, column) -> has numeric / has symbolic observation
  std::map<std::pair<std::string, int>, std::pair<bool, bool>> seen;
  for (const auto& interp : interps) {
    for (const Atom& atom : interp.atoms) {
      const Signature* sig = schema.find(atom.predicate);
      if (!sig) continue;
      for (int col : sig->property_columns()) {
        if (static_cast<size_t>(col) >= atom.args.size()) continue;
        auto& flags = seen[{sig->name, col}];
        if (atom.args[col].numeric)
          flags.first = true;
        else
          flags.second = true;
      }
    }
  }
  PropertyKindTable table;
  for (const auto& [key, flags] : seen) {
    if (flags.first && flags.second)
      throw Error(ErrorKind::MixedPropertyKind,
                  "property column " + std::to_string(key.second + 1) +
                      " of '" + key.first +
                      "' holds both numeric and symbolic values");
    table.set(key.first, key.second,
              flags.first ? PropertyKind::Numeric : PropertyKind::Categorical);
  }
  return table;
}

std::vector<Interpretation> parse_interpretations(std::string_view text,
                                                  const Schema& schema) {
  FactScanner scanner(text);
  return scanner.scan(schema);
}

std::vector<Interpretation> load_interpretations(const std::string& path,
                                                 const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::IoError, "cannot open fact file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  auto interps = parse_interpretations(buf.str(), schema);
  infer_property_kinds(schema, interps);  // validates kind consistency
  return interps;
}

const char* task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::BinaryInterpretation: return "binary-classification-of-interpretations";
    case TaskKind::MulticlassInterpretation: return "multiclass-on-interpretations";
    case TaskKind::RegressionInterpretation: return "regression-on-interpretations";
    case TaskKind::BinaryEntity: return "binary-classification-of-entities";
    case TaskKind::MulticlassEntity: return "multiclass-on-entities";
    case TaskKind::RegressionEntity: return "regression-on-entities";
    case TaskKind::LinkPrediction: return "link-prediction";
    case TaskKind::AttributedLink: return "attributed-link-prediction";
  }
  return "?";
}

std::vector<Task> expand_job(const Schema& schema,
                             const PropertyKindTable& kinds, const Job& job) {
  if (job.targets.empty())
    throw Error(ErrorKind::UnknownTarget, "job declares no target signature");
  std::vector<Task> tasks;
  for (const auto& name : job.targets) {
    const Signature* sig = schema.find(name);
    if (!sig)
      throw Error(ErrorKind::UnknownTarget,
                  "target '" + name + "' is not a declared signature");
    int n = sig->relational_arity();
    auto props = sig->property_columns();
    auto numeric = [&](int col) {
      return kinds.kind(name, col) == PropertyKind::Numeric;
    };
    if (props.empty()) {
      Task t;
      t.target = name;
      t.kind = n == 0   ? TaskKind::BinaryInterpretation
               : n == 1 ? TaskKind::BinaryEntity
                        : TaskKind::LinkPrediction;
      tasks.push_back(t);
      continue;
    }
    for (int col : props) {
      Task t;
      t.target = name;
      t.property_column = col;
      t.numeric_property = numeric(col);
      if (n == 0)
        t.kind = numeric(col) ? TaskKind::RegressionInterpretation
                              : TaskKind::MulticlassInterpretation;
      else if (n == 1)
        t.kind = numeric(col) ? TaskKind::RegressionEntity
                              : TaskKind::MulticlassEntity;
      else
        t.kind = TaskKind::AttributedLink;
      tasks.push_back(t);
    }
  }
  return tasks;
}

std::vector<std::string> output_predicates(const Schema& schema,
                                           const Job& job) {
  for (const auto& target : job.targets)
    if (!schema.find(target))
      throw Error(ErrorKind::UnknownTarget,
                  "target '" + target + "' is not a declared signature");

  // predicate dependency graph over all rule bodies (any polarity,
  // aggregations included): head depends on every body predicate
  std::multimap<std::string, std::string> deps;
  std::function<void(const std::string&, const std::vector<Literal>&)> walk =
      [&](const std::string& head, const std::vector<Literal>& body) {
        for (const auto& lit : body) {
          if (lit.kind == Literal::Kind::Atom ||
              lit.kind == Literal::Kind::NegatedAtom)
            deps.emplace(lit.atom.predicate, head);
          else if (lit.kind == Literal::Kind::Aggregate)
            walk(head, lit.agg->body);
        }
      };
  for (const auto& sig : schema.signatures)
    for (const auto& rule : sig.rules) walk(rule.head.predicate, rule.body);

  // transitive closure upward from the targets
  std::set<std::string> outputs(job.targets.begin(), job.targets.end());
  std::vector<std::string> frontier(job.targets.begin(), job.targets.end());
  while (!frontier.empty()) {
    std::string pred = std::move(frontier.back());
    frontier.pop_back();
    auto [lo, hi] = deps.equal_range(pred);
    for (auto it = lo; it != hi; ++it)
      if (outputs.insert(it->second).second) frontier.push_back(it->second);
  }

  std::vector<std::string> out;
  for (const auto& sig : schema.signatures) {
    bool is_target = std::find(job.targets.begin(), job.targets.end(),
                               sig.name) != job.targets.end();
    if (is_target || (sig.level == Level::Intensional && outputs.count(sig.name)))
      out.push_back(sig.name);
  }
  return out;
}

Partition infer_partition(const Schema& schema, const Job& job,
                          const Interpretation& interp) {
  auto outputs = output_predicates(schema, job);
  std::set<std::string> output_set(outputs.begin(), outputs.end());
  Partition p;
  for (const Atom& atom : interp.atoms) {
    if (output_set.count(atom.predicate))
      p.y.insert(atom);
    else
      p.x.insert(atom);
  }
  return p;
}

AtomSet SliceSystem::atoms_of(size_t slice) const {
  AtomSet out;
  for (const auto& [atom, idx] : assignment)
    if (idx == slice) out.insert(atom);
  return out;
}

AtomSet SliceSystem::atoms_up_to(size_t slice, bool inclusive) const {
  AtomSet out;
  for (const auto& [atom, idx] : assignment)
    if (idx < slice || (inclusive && idx == slice)) out.insert(atom);
  return out;
}

SliceSystem build_slices(const Schema& schema, const Interpretation& interp,
                         const std::string& relation,
                         const std::string& column) {
  const Signature* sig = schema.find(relation);
  if (!sig)
    throw Error(ErrorKind::UnorderableKey,
                "slice relation '" + relation + "' is not declared");
  int col = -1;
  for (size_t i = 0; i < sig->columns.size(); ++i)
    if (sig->columns[i].name == column) col = static_cast<int>(i);
  if (col < 0 || sig->columns[col].kind != ColumnKind::Property)
    throw Error(ErrorKind::UnorderableKey,
                "slice key '" + relation + "." + column +
                    "' is not a property column");

  // keys must be uniformly orderable
  bool any_numeric = false, any_symbolic = false;
  std::set<Constant> key_set;
  for (const Atom& atom : interp.atoms) {
    if (atom.predicate != relation) continue;
    const Constant& key = atom.args[col];
    (key.numeric ? any_numeric : any_symbolic) = true;
    key_set.insert(key);
  }
  if (any_numeric && any_symbolic)
    throw Error(ErrorKind::UnorderableKey,
                "slice keys mix numeric and symbolic values");
  if (key_set.empty())
    throw Error(ErrorKind::UnorderableKey,
                "no atoms of '" + relation + "' to slice by");

  SliceSystem slices;
  slices.keys.assign(key_set.begin(), key_set.end());
  if (any_numeric)
    std::sort(slices.keys.begin(), slices.keys.end(),
              [](const Constant& a, const Constant& b) {
                return a.value < b.value;
              });
  auto key_index = [&](const Constant& key) {
    for (size_t i = 0; i < slices.keys.size(); ++i)
      if (slices.keys[i] == key) return i;
    return size_t{0};
  };

  // direct keys for entities named by the keyed relation
  std::map<std::string, size_t> entity_slice;
  for (const Atom& atom : interp.atoms) {
    if (atom.predicate != relation) continue;
    for (int id_col : sig->identifier_columns()) {
      const std::string& id = atom.args[id_col].text;
      size_t idx = key_index(atom.args[col]);
      auto it = entity_slice.find(id);
      if (it == entity_slice.end() || idx < it->second)
        entity_slice[id] = idx;
    }
  }

  auto atom_ids = [&](const Atom& atom) {
    std::vector<std::string> ids;
    if (const Signature* s = schema.find(atom.predicate)) {
      for (int i : s->identifier_columns())
        if (static_cast<size_t>(i) < atom.args.size())
          ids.push_back(atom.args[i].text);
    }
    return ids;
  };

  // Entities without a direct key debut at the earliest atom connecting
  // them to keyed entities: key(e) = min over atoms of (max over the other
  // participants' keys). Iterated to a fixpoint so keys travel along chains;
  // keys assigned by the keyed relation itself never move.
  std::set<std::string> direct_ids;
  for (const auto& [id, idx] : entity_slice) direct_ids.insert(id);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Atom& atom : interp.atoms) {
      auto ids = atom_ids(atom);
      if (ids.size() < 2) continue;
      for (const auto& id : ids) {
        if (direct_ids.count(id)) continue;
        size_t candidate = 0;
        bool others_keyed = true;
        bool has_other = false;
        for (const auto& other : ids) {
          if (other == id) continue;
          has_other = true;
          auto it = entity_slice.find(other);
          if (it == entity_slice.end()) {
            others_keyed = false;
            break;
          }
          candidate = std::max(candidate, it->second);
        }
        if (!has_other || !others_keyed) continue;
        auto it = entity_slice.find(id);
        if (it == entity_slice.end() || candidate < it->second) {
          entity_slice[id] = candidate;
          changed = true;
        }
      }
    }
  }

  // An atom becomes visible once all of its participants exist; atoms in
  // components with no keyed entity land in the first slice.
  for (const Atom& atom : interp.atoms) {
    size_t when = 0;
    bool all_keyed = true;
    auto ids = atom_ids(atom);
    for (const auto& id : ids) {
      auto it = entity_slice.find(id);
      if (it == entity_slice.end()) {
        all_keyed = false;
        break;
      }
      when = std::max(when, it->second);
    }
    if (atom.predicate == relation) when = key_index(atom.args[col]);
    slices.assignment[atom] = (all_keyed && !ids.empty()) ? when : 0;
  }
  return slices;
}

}  // namespace relkit

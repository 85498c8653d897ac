#include "relkit/datalog.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "relkit/error.hpp"

namespace relkit {

namespace {

using Database = std::map<std::string, AtomSet>;

struct DepEdge {
  std::string from;
  std::string to;
  bool negative;  // negation or aggregation
};

void collect_dependencies(const Rule& rule, std::vector<DepEdge>& edges) {
  for (const auto& lit : rule.body) {
    switch (lit.kind) {
      case Literal::Kind::Atom:
        edges.push_back({rule.head.predicate, lit.atom.predicate, false});
        break;
      case Literal::Kind::NegatedAtom:
        edges.push_back({rule.head.predicate, lit.atom.predicate, true});
        break;
      case Literal::Kind::Aggregate:
        for (const auto& inner : lit.agg->body)
          if (inner.kind == Literal::Kind::Atom ||
              inner.kind == Literal::Kind::NegatedAtom)
            edges.push_back(
                {rule.head.predicate, inner.atom.predicate, true});
        break;
      case Literal::Kind::Compare:
        break;
    }
  }
}

// Environment of variable bindings during body evaluation.
using Env = std::map<std::string, Constant>;

bool unify_atom(const AtomPattern& pattern, const Atom& atom, Env& env,
                std::vector<std::string>& trail) {
  if (pattern.predicate != atom.predicate) return false;
  if (pattern.args.size() != atom.args.size()) return false;
  for (size_t i = 0; i < pattern.args.size(); ++i) {
    const Term& t = pattern.args[i];
    if (!t.is_var) {
      if (t.constant != atom.args[i]) return false;
      continue;
    }
    auto it = env.find(t.var);
    if (it != env.end()) {
      if (it->second != atom.args[i]) return false;
    } else {
      env.emplace(t.var, atom.args[i]);
      trail.push_back(t.var);
    }
  }
  return true;
}

void undo(Env& env, std::vector<std::string>& trail, size_t mark) {
  while (trail.size() > mark) {
    env.erase(trail.back());
    trail.pop_back();
  }
}

Constant resolve(const Term& t, const Env& env) {
  if (!t.is_var) return t.constant;
  auto it = env.find(t.var);
  if (it == env.end())
    throw Error(ErrorKind::TypeMismatch,
                "unbound variable " + t.var + " in comparison");
  return it->second;
}

bool eval_comparison(const Comparison& cmp, Env& env,
                     std::vector<std::string>& trail) {
  if (cmp.op == Cmp::Eq) {
    // '=' may bind one unbound side
    bool lhs_bound = !cmp.lhs.is_var || env.count(cmp.lhs.var);
    bool rhs_bound = !cmp.rhs.is_var || env.count(cmp.rhs.var);
    if (lhs_bound && !rhs_bound) {
      env.emplace(cmp.rhs.var, resolve(cmp.lhs, env));
      trail.push_back(cmp.rhs.var);
      return true;
    }
    if (rhs_bound && !lhs_bound) {
      env.emplace(cmp.lhs.var, resolve(cmp.rhs, env));
      trail.push_back(cmp.lhs.var);
      return true;
    }
  }
  Constant a = resolve(cmp.lhs, env);
  Constant b = resolve(cmp.rhs, env);
  if (cmp.op == Cmp::Eq || cmp.op == Cmp::Ne) {
    bool eq = (a.numeric && b.numeric) ? a.value == b.value : a.text == b.text;
    return cmp.op == Cmp::Eq ? eq : !eq;
  }
  int order;
  if (a.numeric && b.numeric) {
    order = a.value < b.value ? -1 : (a.value > b.value ? 1 : 0);
  } else if (!a.numeric && !b.numeric) {
    order = a.text < b.text ? -1 : (a.text > b.text ? 1 : 0);
  } else {
    throw Error(ErrorKind::TypeMismatch,
                "comparison between numeric and symbolic constants: '" +
                    a.text + "' vs '" + b.text + "'");
  }
  switch (cmp.op) {
    case Cmp::Lt: return order < 0;
    case Cmp::Gt: return order > 0;
    case Cmp::Le: return order <= 0;
    case Cmp::Ge: return order >= 0;
    default: return false;
  }
}

class RuleEvaluator {
 public:
  RuleEvaluator(const Database& db, const AtomSet* delta,
                const std::string* delta_predicate)
      : db_(db), delta_(delta), delta_predicate_(delta_predicate) {}

  /// Enumerates all bindings of rule.body; delta_position (when >= 0) pins
  /// one positive literal to the delta set for semi-naive evaluation.
  void run(const Rule& rule, int delta_position,
           const std::function<void(const Env&)>& emit) {
    emit_ = &emit;
    Env env;
    std::vector<std::string> trail;
    eval_from(rule.body, 0, delta_position, env, trail);
  }

 private:
  static const AtomSet& empty_set() {
    static const AtomSet empty;
    return empty;
  }

  const AtomSet& relation(const std::string& predicate) const {
    auto it = db_.find(predicate);
    return it == db_.end() ? empty_set() : it->second;
  }

  void eval_from(const std::vector<Literal>& body, size_t index,
                 int delta_position, Env& env,
                 std::vector<std::string>& trail) {
    if (index == body.size()) {
      (*emit_)(env);
      return;
    }
    const Literal& lit = body[index];
    switch (lit.kind) {
      case Literal::Kind::Atom: {
        bool use_delta = delta_position == static_cast<int>(index) && delta_;
        const AtomSet& source =
            use_delta ? *delta_ : relation(lit.atom.predicate);
        for (const Atom& atom : source) {
          if (use_delta && atom.predicate != lit.atom.predicate) continue;
          size_t mark = trail.size();
          if (unify_atom(lit.atom, atom, env, trail))
            eval_from(body, index + 1, delta_position, env, trail);
          undo(env, trail, mark);
        }
        return;
      }
      case Literal::Kind::NegatedAtom: {
        Atom ground;
        ground.predicate = lit.atom.predicate;
        for (const auto& t : lit.atom.args) ground.args.push_back(resolve(t, env));
        if (!relation(ground.predicate).count(ground))
          eval_from(body, index + 1, delta_position, env, trail);
        return;
      }
      case Literal::Kind::Compare: {
        size_t mark = trail.size();
        if (eval_comparison(lit.cmp, env, trail))
          eval_from(body, index + 1, delta_position, env, trail);
        else
          undo(env, trail, mark);
        return;
      }
      case Literal::Kind::Aggregate: {
        const Aggregation& agg = *lit.agg;
        std::set<std::vector<Constant>> tuples;
        Env inner_env = env;
        std::vector<std::string> inner_trail;
        collect_tuples(agg, agg.body, 0, inner_env, inner_trail, tuples);
        if (tuples.empty()) return;  // setof semantics: empty group fails
        Constant result = aggregate(agg, tuples);
        size_t mark = trail.size();
        auto it = env.find(agg.result_var);
        if (it != env.end()) {
          if (it->second != result) return;
        } else {
          env.emplace(agg.result_var, result);
          trail.push_back(agg.result_var);
        }
        eval_from(body, index + 1, delta_position, env, trail);
        undo(env, trail, mark);
        return;
      }
    }
  }

  void collect_tuples(const Aggregation& agg,
                      const std::vector<Literal>& body, size_t index, Env& env,
                      std::vector<std::string>& trail,
                      std::set<std::vector<Constant>>& tuples) {
    if (index == body.size()) {
      std::vector<Constant> tuple;
      tuple.reserve(agg.vars.size());
      for (const auto& v : agg.vars) {
        auto it = env.find(v);
        if (it == env.end())
          throw Error(ErrorKind::TypeMismatch,
                      "aggregated variable " + v + " is unbound");
        tuple.push_back(it->second);
      }
      tuples.insert(std::move(tuple));
      return;
    }
    const Literal& lit = body[index];
    switch (lit.kind) {
      case Literal::Kind::Atom: {
        for (const Atom& atom : relation(lit.atom.predicate)) {
          size_t mark = trail.size();
          if (unify_atom(lit.atom, atom, env, trail))
            collect_tuples(agg, body, index + 1, env, trail, tuples);
          undo(env, trail, mark);
        }
        return;
      }
      case Literal::Kind::NegatedAtom: {
        Atom ground;
        ground.predicate = lit.atom.predicate;
        for (const auto& t : lit.atom.args) ground.args.push_back(resolve(t, env));
        if (!relation(ground.predicate).count(ground))
          collect_tuples(agg, body, index + 1, env, trail, tuples);
        return;
      }
      case Literal::Kind::Compare: {
        size_t mark = trail.size();
        if (eval_comparison(lit.cmp, env, trail))
          collect_tuples(agg, body, index + 1, env, trail, tuples);
        else
          undo(env, trail, mark);
        return;
      }
      case Literal::Kind::Aggregate:
        throw Error(ErrorKind::Internal, "nested aggregation");
    }
  }

  static Constant aggregate(const Aggregation& agg,
                            const std::set<std::vector<Constant>>& tuples) {
    if (agg.kind == AggKind::Count)
      return Constant::parse(std::to_string(tuples.size()));

    bool all_numeric = true;
    bool all_symbolic = true;
    for (const auto& t : tuples) {
      if (t.front().numeric) all_symbolic = false;
      else all_numeric = false;
    }
    if (agg.kind == AggKind::Sum) {
      if (!all_numeric)
        throw Error(ErrorKind::TypeMismatch,
                    "sum over non-numeric values in aggregation");
      double total = 0.0;
      for (const auto& t : tuples) total += t.front().value;
      return Constant::from_number(total);
    }
    if (!all_numeric && !all_symbolic)
      throw Error(ErrorKind::TypeMismatch,
                  "min/max over mixed numeric and symbolic values");
    const std::vector<Constant>* best = nullptr;
    for (const auto& t : tuples) {
      if (!best) {
        best = &t;
        continue;
      }
      bool smaller = all_numeric ? t.front().value < best->front().value
                                 : t.front().text < best->front().text;
      if ((agg.kind == AggKind::Min) == smaller) best = &t;
    }
    return best->front();
  }

  const Database& db_;
  const AtomSet* delta_;
  const std::string* delta_predicate_;
  const std::function<void(const Env&)>* emit_ = nullptr;
};

Atom instantiate_head(const AtomPattern& head, const Env& env) {
  Atom atom;
  atom.predicate = head.predicate;
  atom.args.reserve(head.args.size());
  for (const auto& t : head.args) {
    if (t.is_var) {
      auto it = env.find(t.var);
      if (it == env.end())
        throw Error(ErrorKind::TypeMismatch,
                    "head variable " + t.var + " unbound at derivation");
      atom.args.push_back(it->second);
    } else {
      atom.args.push_back(t.constant);
    }
  }
  return atom;
}

}  // namespace

std::vector<Rule> collect_rules(const Schema& schema) {
  std::vector<Rule> rules;
  for (const auto& sig : schema.signatures)
    for (const auto& rule : sig.rules) rules.push_back(rule);
  return rules;
}

std::vector<Stratum> stratify(const std::vector<Rule>& rules,
                              const Schema& schema) {
  (void)schema;
  std::set<std::string> derived;
  for (const auto& rule : rules) derived.insert(rule.head.predicate);

  std::vector<DepEdge> edges;
  for (const auto& rule : rules) collect_dependencies(rule, edges);
  // only dependencies on derived predicates constrain the ordering
  std::erase_if(edges, [&](const DepEdge& e) { return !derived.count(e.to); });

  // level(p) = 1 for predicates with no derived dependencies; negative
  // dependencies raise the level by one. Iterate to fixpoint; a level
  // exceeding the predicate count certifies a cycle through negation.
  std::map<std::string, int> level;
  for (const auto& p : derived) level[p] = 1;
  const int max_level = static_cast<int>(derived.size()) + 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : edges) {
      int required = level[e.to] + (e.negative ? 1 : 0);
      if (level[e.from] < required) {
        level[e.from] = required;
        changed = true;
        if (level[e.from] > max_level) {
          // walk the dependency graph back from the violating edge to list
          // the predicates on the offending cycle
          std::set<std::string> on_cycle{e.from};
          bool grew = true;
          while (grew) {
            grew = false;
            for (const auto& d : edges)
              if (on_cycle.count(d.from) && !on_cycle.count(d.to) &&
                  level[d.to] > max_level - static_cast<int>(derived.size()))
                grew = on_cycle.insert(d.to).second || grew;
          }
          std::string cycle;
          for (const auto& p : on_cycle) {
            if (!cycle.empty()) cycle += " -> ";
            cycle += p;
          }
          throw Error(ErrorKind::UnstratifiableProgram,
                      "recursion through negation or aggregation: cycle "
                      "involves " + cycle);
        }
      }
    }
  }

  std::map<int, Stratum> by_level;
  for (const auto& [pred, lvl] : level) by_level[lvl].predicates.push_back(pred);
  for (const auto& rule : rules)
    by_level[level[rule.head.predicate]].rules.push_back(rule);

  std::vector<Stratum> out;
  out.reserve(by_level.size());
  for (auto& [lvl, stratum] : by_level) out.push_back(std::move(stratum));
  return out;
}

AtomSet evaluate_intensional(const Schema& schema,
                             const AtomSet& extensional_atoms) {
  // type-check the database against the declared signatures; atoms of
  // intensional signatures may appear as seeds (the fixpoint re-derives them)
  for (const Atom& atom : extensional_atoms) {
    const Signature* sig = schema.find(atom.predicate);
    if (!sig) continue;
    if (atom.args.size() != sig->columns.size())
      throw Error(ErrorKind::TypeMismatch,
                  "atom '" + atom.to_string() + "' has arity " +
                      std::to_string(atom.args.size()) + ", signature '" +
                      sig->name + "' declares " +
                      std::to_string(sig->columns.size()));
  }

  std::vector<Rule> rules = collect_rules(schema);
  std::vector<Stratum> strata = stratify(rules, schema);

  Database db;
  for (const Atom& atom : extensional_atoms) db[atom.predicate].insert(atom);

  for (const Stratum& stratum : strata) {
    std::set<std::string> here(stratum.predicates.begin(),
                               stratum.predicates.end());
    AtomSet delta;
    auto add_atom = [&](const Atom& atom, AtomSet& fresh) {
      auto& rel = db[atom.predicate];
      if (rel.insert(atom).second) fresh.insert(atom);
    };

    // initial round: plain evaluation of every rule in the stratum
    {
      AtomSet fresh;
      for (const Rule& rule : stratum.rules) {
        RuleEvaluator eval(db, nullptr, nullptr);
        eval.run(rule, -1, [&](const Env& env) {
          add_atom(instantiate_head(rule.head, env), fresh);
        });
      }
      delta = std::move(fresh);
    }

    // semi-naive rounds: each new derivation must touch the delta
    while (!delta.empty()) {
      AtomSet fresh;
      for (const Rule& rule : stratum.rules) {
        for (size_t i = 0; i < rule.body.size(); ++i) {
          const Literal& lit = rule.body[i];
          if (lit.kind != Literal::Kind::Atom) continue;
          if (!here.count(lit.atom.predicate)) continue;
          RuleEvaluator eval(db, &delta, &lit.atom.predicate);
          eval.run(rule, static_cast<int>(i), [&](const Env& env) {
            add_atom(instantiate_head(rule.head, env), fresh);
          });
        }
      }
      delta = std::move(fresh);
    }
  }

  AtomSet result;
  for (const auto& sig : schema.signatures) {
    if (sig.level != Level::Intensional) continue;
    auto it = db.find(sig.name);
    if (it == db.end()) continue;
    for (const Atom& atom : it->second) result.insert(atom);
  }
  return result;
}

}  // namespace relkit

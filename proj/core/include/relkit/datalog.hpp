#pragma once

#include <map>
#include <string>
#include <vector>

#include "relkit/atom.hpp"
#include "relkit/rules.hpp"
#include "relkit/schema.hpp"

namespace relkit {

struct Stratum {
  std::vector<std::string> predicates;
  std::vector<Rule> rules;
};

/// Orders rules into strata so that every negated or aggregated dependency
/// points at a strictly lower stratum; recursion through positive literals
/// stays inside one stratum. Throws UnstratifiableProgram with the offending
/// cycle when negation or aggregation is recursive.
std::vector<Stratum> stratify(const std::vector<Rule>& rules,
                              const Schema& schema);

/// Derives all true ground atoms of the declared intensional signatures from
/// the extensional database, bottom-up per stratum (semi-naive fixpoint).
/// Atoms of undeclared predicates are evaluable in rule bodies. Auxiliary
/// rule heads (undeclared predicates) are derived but not reported.
AtomSet evaluate_intensional(const Schema& schema,
                             const AtomSet& extensional_atoms);

/// All rule clauses attached to the schema's signatures, in declaration
/// order.
std::vector<Rule> collect_rules(const Schema& schema);

}  // namespace relkit

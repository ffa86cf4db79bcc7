#pragma once

#include "prefq/plan.hpp"
#include "prefq/solver.hpp"

#include <span>
#include <string>
#include <vector>

namespace prefq {

// The algebraic laws the optimizer knows, in their application order.
enum class Rule {
    AbsorbWinnow,        // nested winnows with one formula entailing the other
    PushSelection,       // selection through winnow or rank
    PushProjection,      // projection through winnow, with formula restriction
    DistributeProduct,   // winnow of a Pareto composition over a product
    DistributeUnionDiff, // winnow over union/difference (empty preference only)
};

const char* rule_name(Rule r);
std::vector<Rule> all_rules();

// One precondition the optimizer asked the solver about: where, what
// sentence, the verdict, and whether the plan changed. Fired rewrites are
// logged as they happen; locations of refusals refer to the final plan.
struct TraceEntry {
    Rule rule = Rule::AbsorbWinnow;
    std::string location;          // child path of the inspected node, "/0/1"
    std::string precondition;      // the sentence, in formula syntax
    std::string verdict;           // valid | invalid | budget-exceeded
    bool applied = false;
    std::string detail;            // counterexample / violated property
    solver::Assignment counterexample;
};

struct OptimizeResult {
    PlanPtr plan;
    std::vector<TraceEntry> trace;
};

// Applies each enabled rule to a fixpoint, in rule order, rewriting
// wherever the solver proves the rule's precondition; afterwards records a
// refusal entry for every place a rule still matches structurally but its
// precondition fails. The result plan always evaluates to the same
// relation as the input.
OptimizeResult optimize(const PlanPtr& plan, std::span<const Rule> rules,
                        const Budget& budget = {});
OptimizeResult optimize(const PlanPtr& plan, const Budget& budget = {});

// Replaces every winnow node by plain algebra: per disjunct, a dominator
// selection and a dominated selection joined by the mixed atoms over a
// self-product, a union over the disjuncts, and a difference removing the
// dominated side.
PlanPtr expand_winnow(const PlanPtr& plan);

// Set difference computed by winnow: tag left rows 1 and right rows 0,
// prefer the 0-tagged twin of an equal row, keep rows whose tag survives
// nonzero, and project the tag away.
PlanPtr diff_via_winnow(const PlanPtr& left, const PlanPtr& right);

} // namespace prefq

#pragma once

#include "prefq/formula.hpp"

#include <span>
#include <string>
#include <vector>

namespace prefq {

enum class SetOp { Union, Intersection, Difference };

// Boolean combination of two preference formulas over the same schema.
// Union keeps every preference either input states; intersection keeps the
// shared ones; difference keeps those of c1 that c2 does not state.
Formula boolean_compose(SetOp op, const Formula& c1, const Formula& c2,
                        const Budget& budget = {});

// Prefer according to c2 unless c1 applies:
// c1(t1,t2) or (not c1(t2,t1) and c2(t1,t2)).
Formula prioritized(const Formula& c1, const Formula& c2, const Budget& budget = {});

// Componentwise composition over the product of the two schemas: each side
// must be at least as good and one side strictly better. Right-hand
// attribute names get "_r" appended while they collide with earlier names.
// The result remembers its operands, which later lets a winnow over a
// product split back into winnows of the factors.
Formula pareto(const Formula& c1, const Formula& c2, const Budget& budget = {});

// Restriction of the preference to the attributes in X: u is preferred to
// u' when every pair of full tuples agreeing with them on X is ordered by
// c. Computed by double negation around existential elimination of the
// non-X tuple variables.
Formula restrict_to(const Formula& c, std::span<const std::string> attrs,
                    const Budget& budget = {});

// Least transitive preference relation containing c, as a finite formula.
// Disjuncts are kept in canonical constraint-set form; pairs are chained
// through a fresh middle variable which is then eliminated, until no new
// canonical disjunct appears.
Formula transitive_closure(const Formula& c, const Budget& budget = {});

// The strict part of a (transitive) preference relation:
// c(t1,t2) and not c(t2,t1). Refuses non-transitive input unless forced.
Formula strict_core(const Formula& c, const Budget& budget = {}, bool force = false);

enum class SkyMode { Min, Max, Diff };

struct SkylineEntry {
    std::string attr;
    SkyMode mode;
};

// Ordered skyline directives; MIN/MAX apply to num attributes and at least
// one entry must be MIN or MAX.
struct SkylineClause {
    std::vector<SkylineEntry> entries;
};

// The dominance formula of a skyline clause: equality on DIFF attributes,
// weak improvement on every MIN/MAX attribute, strict improvement on at
// least one.
Formula skyline_formula(const SkylineClause& clause, const Schema& schema,
                        const Budget& budget = {});

struct ScoringSpec {
    std::string score_attr;
    Rational slack = 0; // nonnegative
};

// Dominance by score: with zero slack, t1.score > t2.score; with positive
// slack d, t1 must beat t2 by more than d, read from a pre-materialized
// "<score>_minus_d" column so atoms stay arithmetic-free.
Formula scoring_formula(const ScoringSpec& spec, const Schema& schema);

} // namespace prefq

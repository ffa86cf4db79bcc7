#pragma once

#include "prefq/formula.hpp"

#include <string>
#include <vector>

namespace prefq {

// Verdict for one order-theoretic property. When the property fails,
// `witness` holds concrete tuples violating it: one tuple for
// irreflexivity, two for asymmetry and connectivity, three for the
// transitivity variants.
struct PropertyCheck {
    bool holds = false;
    std::vector<Tuple> witness;
};

struct PropertyReport {
    PropertyCheck irreflexive;
    PropertyCheck asymmetric;
    PropertyCheck transitive;
    PropertyCheck negatively_transitive;
    PropertyCheck connected;

    bool strict_partial_order() const {
        return irreflexive.holds && asymmetric.holds && transitive.holds;
    }
    bool weak_order() const { return strict_partial_order() && negatively_transitive.holds; }
    bool total_order() const { return strict_partial_order() && connected.holds; }
};

// Decides the five base properties of a two-variable preference formula by
// checking the satisfiability of each property's negated sentence. The
// connectivity sentence treats tuples as equal when they agree on every
// attribute. Results are cached per (schema, formula) text.
PropertyReport check_properties(const Formula& f, const Budget& budget = {});

// Neither tuple is preferred to the other.
bool indifferent(const Formula& f, const Tuple& t1, const Tuple& t2);

} // namespace prefq

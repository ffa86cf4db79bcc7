#pragma once

#include "prefq/formula.hpp"
#include "prefq/relation.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace prefq::solver {

// A flat variable: one attribute of one tuple variable.
struct VarKey {
    std::string var;
    std::string attr;
    std::string text() const { return var + "." + attr; }
    friend bool operator==(const VarKey&, const VarKey&) = default;
    friend std::strong_ordering operator<=>(const VarKey&, const VarKey&) = default;
};

using Assignment = std::map<VarKey, Value>;

struct SatResult {
    bool sat = false;
    Assignment assignment; // a witness when sat
};

// Canonical form of a conjunction of comparison atoms. Num terms are
// interpreted over the dense rational order, str terms over an infinite
// domain with equality only. Equal conjuncts over the same vocabulary have
// equal canonical keys; unsatisfiable conjuncts collapse to a distinguished
// unsat object.
class ConstraintSet {
public:
    ConstraintSet() = default;

    bool unsat() const { return unsat_; }
    const Schema& schema() const { return schema_; }

    // Canonical serialization.
    std::string key() const;

    // A reduced conjunct generating the same constraints (requires sat).
    Conjunct atoms() const;
    // Every stored fact, no redundancy reduction (requires sat).
    Conjunct full_atoms() const;

    // A satisfying assignment for every variable present (requires sat).
    Assignment witness() const;

    std::vector<VarKey> variables() const;

    // Existential elimination of v over the dense num order / infinite str
    // domain. Num disequalities against v split into < and >, so the result
    // is a small disjunction of constraint sets (usually one).
    std::vector<ConstraintSet> eliminate(const VarKey& v) const;

    friend ConstraintSet canonicalize(const Conjunct& atoms, const Schema& schema);

private:
    struct Class {
        std::vector<VarKey> vars; // sorted
        std::optional<Value> constant;
        Sort sort = Sort::Num;
    };

    Term repr(size_t cls) const;
    ConstraintSet drop_solo_class(size_t cls) const;
    ConstraintSet without_var(const VarKey& v, size_t cls) const;

    Schema schema_;
    bool unsat_ = false;
    std::vector<Class> classes_;
    // rel_[i][j]: 0 none, 1 <=, 2 <; full transitive closure, num classes only.
    std::vector<std::vector<uint8_t>> rel_;
    std::vector<std::pair<size_t, size_t>> ne_; // sorted pairs (i < j)
};

// Builds the canonical form of a conjunction.
ConstraintSet canonicalize(const Conjunct& atoms, const Schema& schema);

SatResult satisfiable(const Conjunct& c, const Schema& schema);
SatResult satisfiable(const Dnf& d, const Schema& schema);

// Drops disjuncts with no satisfying assignment.
Dnf prune_unsat(Dnf d, const Schema& schema);

// Existential elimination of the listed flat variables from every
// disjunct, deduplicating by canonical key; unsatisfiable disjuncts drop
// out along the way.
Dnf eliminate_vars(const Dnf& d, std::span<const VarKey> kill, const Schema& schema,
                   const Budget& budget);

// Logical negation in DNF, pruning unsatisfiable disjuncts as the
// distribution proceeds so intermediate products stay small.
Dnf negate_dnf(const Dnf& d, const Schema& schema, const Budget& budget);

struct ImplicationResult {
    bool implied = false;
    Assignment counterexample; // when not implied
};

// a entails b over all assignments.
ImplicationResult implies(const Dnf& a, const Dnf& b, const Schema& schema, const Budget& budget);

struct ValidityResult {
    bool valid = false;
    Assignment counterexample; // when not valid
};

// The sentence holds under every assignment.
ValidityResult valid(const BoolExpr& sentence, const Schema& schema, const Budget& budget);

// Renames tuple variables inside a conjunct.
Conjunct rename_conjunct(Conjunct c, const std::map<std::string, std::string>& renaming);

} // namespace prefq::solver

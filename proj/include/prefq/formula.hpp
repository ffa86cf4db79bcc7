#pragma once

#include "prefq/relation.hpp"

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace prefq {

// Comparison operators. Order operators apply to num terms only; equality
// and inequality apply between any two terms of the same sort.
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* op_text(CmpOp op);
CmpOp complement_op(CmpOp op); // logical negation: < becomes >=, = becomes <>, ...
CmpOp mirror_op(CmpOp op);     // swap sides: < becomes >, = stays =

// One side of a comparison: either tuplevar.Attr or a constant.
struct Term {
    static Term attr(std::string var, std::string attr_name) {
        Term t;
        t.var = std::move(var);
        t.attr_name = std::move(attr_name);
        return t;
    }
    static Term constant(Value v) {
        Term t;
        t.value = std::move(v);
        return t;
    }

    bool is_attr() const { return !var.empty(); }
    std::string text() const;

    std::string var;            // empty for constants
    std::string attr_name;      // empty for constants
    std::optional<Value> value; // empty for attribute references

    friend bool operator==(const Term&, const Term&);
    friend std::strong_ordering operator<=>(const Term&, const Term&);
};

struct Atom {
    Term lhs;
    CmpOp op;
    Term rhs;

    std::string text() const;
    friend bool operator==(const Atom&, const Atom&) = default;
    friend std::strong_ordering operator<=>(const Atom&, const Atom&) = default;
};

// Orients the atom canonically (smaller term first) so equal atoms compare
// equal structurally.
Atom orient_atom(Atom a);
Atom complement_atom(const Atom& a); // the negation, as a single atom

// A conjunction of atoms, kept sorted and deduplicated. The empty conjunct
// is the constant true.
using Conjunct = std::vector<Atom>;

// A disjunction of conjuncts in user order, deduplicated. The empty
// disjunction is the constant false; {{}} is the constant true.
using Dnf = std::vector<Conjunct>;

// Cap on DNF growth; exceeded caps raise BudgetError.
struct Budget {
    size_t max_disjuncts = 10000;
    void charge(size_t disjuncts) const;
};

Dnf dnf_true();
Dnf dnf_false();
bool is_true_dnf(const Dnf& d);
bool is_false_dnf(const Dnf& d);

// Sorts and dedups atoms, evaluates ground (constant-vs-constant) atoms and
// atoms whose two sides are the same term. Returns nullopt when the
// conjunct is syntactically unsatisfiable.
std::optional<Conjunct> normalize_conjunct(Conjunct c);
Dnf normalize_dnf(Dnf d);

// "... and ... or ..." rendering; "false"/"true" for the empty forms.
std::string dnf_text(const Dnf& d);

// Renames attribute references (under every variable) and re-normalizes.
Dnf rename_attributes(Dnf d, const std::map<std::string, std::string>& renaming);

Dnf dnf_or(Dnf a, const Dnf& b, const Budget& budget);
Dnf dnf_and(const Dnf& a, const Dnf& b, const Budget& budget);
// Pure syntactic negation (complement atoms + distribution); no pruning.
Dnf dnf_not(const Dnf& d, const Budget& budget);

// Shrinks intermediate disjunctions during DNF conversion; the solver
// plugs in unsatisfiability pruning here.
using DnfPruner = std::function<Dnf(Dnf)>;

// Boolean combinations of atoms, for building solver sentences and as the
// parse tree before DNF conversion.
class BoolExpr {
public:
    static BoolExpr atom(Atom a);
    static BoolExpr conj(std::vector<BoolExpr> xs);
    static BoolExpr disj(std::vector<BoolExpr> xs);
    static BoolExpr negation(BoolExpr x);
    static BoolExpr constant(bool b);
    static BoolExpr from_dnf(const Dnf& d);

    Dnf to_dnf(const Budget& budget, const DnfPruner& prune = {}) const;
    std::string text() const;

private:
    enum class Kind { Atom, And, Or, Not, True, False };
    Kind kind_ = Kind::True;
    std::optional<Atom> atom_;
    std::vector<BoolExpr> children_;

    Dnf to_dnf_impl(bool negated, const Budget& budget, const DnfPruner& prune) const;
};

class Formula;

// Provenance for formulas produced by the Pareto composition; lets the
// planner distribute a winnow over the product it came from.
struct ParetoParts {
    std::shared_ptr<const Formula> left;  // over the left operand schema
    std::shared_ptr<const Formula> right; // over the right operand schema
    size_t split;                         // arity of the left operand
};

// A quantifier-free comparison formula over named tuple variables ranging
// over a single schema. Preference formulas use two variables; selection
// conditions use one.
class Formula {
public:
    Formula() = default;
    // Validates every atom against the schema and variable list.
    Formula(Schema schema, std::vector<std::string> vars, Dnf dnf);

    const Schema& schema() const { return schema_; }
    const std::vector<std::string>& vars() const { return vars_; }
    const Dnf& dnf() const { return dnf_; }
    size_t disjunct_count() const { return dnf_.size(); }

    bool is_pref() const { return vars_.size() == 2; }
    bool is_selection() const { return vars_.size() == 1; }

    const std::shared_ptr<const ParetoParts>& pareto_parts() const { return pareto_; }
    void set_pareto_parts(std::shared_ptr<const ParetoParts> p) { pareto_ = std::move(p); }

    std::string text() const;

    // The same dnf with variables renamed positionally to new_vars.
    Dnf instantiate(std::span<const std::string> new_vars) const;

    friend bool operator==(const Formula& a, const Formula& b) {
        return a.schema_ == b.schema_ && a.vars_ == b.vars_ && a.dnf_ == b.dnf_;
    }

private:
    Schema schema_;
    std::vector<std::string> vars_;
    Dnf dnf_;
    std::shared_ptr<const ParetoParts> pareto_;
};

// Compiled ground evaluator: resolves attribute indices once, then
// evaluates the formula under an assignment of tuples to variables
// (positionally matching formula.vars()).
class Evaluator {
public:
    explicit Evaluator(const Formula& f);
    bool eval(std::span<const Tuple* const> tuples) const;
    bool eval2(const Tuple& t1, const Tuple& t2) const;
    bool eval1(const Tuple& t) const;

private:
    struct Side {
        int var = -1; // -1: constant
        size_t attr = 0;
        Value value;
    };
    struct CAtom {
        Side lhs;
        CmpOp op;
        Side rhs;
    };
    std::vector<std::vector<CAtom>> dnf_;
    size_t nvars_;
};

// t1 is preferred to t2 under f (a two-variable formula).
bool dominates(const Formula& f, const Tuple& t1, const Tuple& t2);
// The single-variable condition f holds for t.
bool holds(const Formula& f, const Tuple& t);

// Logical negation with unsatisfiable disjuncts pruned.
Formula negate(const Formula& f, const Budget& budget);
// Exchanges the two tuple variables: swap(C)(t1,t2) = C(t2,t1).
Formula swap_vars(const Formula& f);

// Per-attribute equality of two tuple variables, optionally restricted to
// the named attributes: a single conjunct varA.X = varB.X for X in attrs.
Conjunct tuple_eq_conjunct(const Schema& schema, const std::string& var_a,
                           const std::string& var_b,
                           std::span<const std::string> attrs = {});

// Parsers. Atoms use =, <>, <, <=, >, >= between terms (tuplevar.Attr,
// decimal numbers, 'string' literals); connectives are not/and/or with
// parentheses; true and false are accepted as constants.
Formula parse_pref_formula(std::string_view text, const Schema& schema,
                           const std::string& var1, const std::string& var2,
                           const Budget& budget);
// The single tuple variable is inferred from the condition text.
Formula parse_selection(std::string_view text, const Schema& schema, const Budget& budget);

} // namespace prefq

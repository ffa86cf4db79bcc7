#pragma once

#include "prefq/eval.hpp"
#include "prefq/formula.hpp"
#include "prefq/relation.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace prefq {

// Arithmetic over num attributes and rational constants, evaluated exactly;
// used by the extend operator to materialize computed columns (tags, score
// slack). Division is deliberately absent.
class ArithExpr {
public:
    static ArithExpr constant(Rational v);
    static ArithExpr attribute(std::string name);
    static ArithExpr binary(char op, ArithExpr lhs, ArithExpr rhs); // +, -, *

    // Every referenced attribute must exist and be numeric.
    void validate(const Schema& schema) const;
    Rational eval(const Schema& schema, const Tuple& t) const;
    std::string text() const;

private:
    ArithExpr() = default;
    char op_ = 'c'; // 'c' constant, 'a' attribute, or one of + - *
    Rational value_ = 0;
    std::string attr_;
    std::vector<ArithExpr> args_;
};

enum class PlanOp {
    Scan,
    Select,
    Project,
    Product,
    Union,
    Diff,
    Extend,
    GroupCount,
    Winnow,
    WinnowIter,
    Rank,
    WeakWinnow,
};

const char* plan_op_name(PlanOp op);

class Plan;
using PlanPtr = std::shared_ptr<const Plan>;

// An immutable logical query plan. Every factory type-checks its operands
// and derives the node's output schema, so a constructed plan is
// schema-correct everywhere.
class Plan {
public:
    // Leaf over a named relation; the schema is fixed at build time and
    // checked against the catalog when evaluated.
    static PlanPtr scan(std::string name, Schema schema);
    // condition: one-variable formula over the input schema.
    static PlanPtr select(Formula condition, PlanPtr input);
    static PlanPtr project(std::vector<std::string> attrs, PlanPtr input);
    static PlanPtr product(PlanPtr left, PlanPtr right);
    // Operands need compatible schemas; names come from the left one.
    static PlanPtr set_union(PlanPtr left, PlanPtr right);
    static PlanPtr set_difference(PlanPtr left, PlanPtr right);
    // Appends a computed num column.
    static PlanPtr extend(std::string attr, ArithExpr expr, PlanPtr input);
    // Groups by group_attrs and counts distinct distinct_attr values per
    // group into the num column out_attr.
    static PlanPtr group_count(std::vector<std::string> group_attrs, std::string distinct_attr,
                               std::string out_attr, PlanPtr input);
    // pref: two-variable formula over the input schema. label, when given,
    // is the display name the preference was declared under.
    static PlanPtr winnow(Formula pref, PlanPtr input, WinnowOptions opts = {},
                          std::string label = {});
    static PlanPtr winnow_iter(Formula pref, size_t n, PlanPtr input, WinnowOptions opts = {},
                               std::string label = {});
    static PlanPtr rank(Formula pref, PlanPtr input, WinnowOptions opts = {},
                        std::string label = {});
    static PlanPtr weak_winnow(Formula pref, PlanPtr input, WinnowOptions opts = {},
                               std::string label = {});

    PlanOp op() const { return op_; }
    const Schema& schema() const { return schema_; }
    const std::vector<PlanPtr>& children() const { return children_; }
    const PlanPtr& child(size_t i = 0) const { return children_.at(i); }

    const std::string& scan_name() const { return name_; }               // Scan
    const Formula& condition() const { return *condition_; }             // Select
    const std::vector<std::string>& attrs() const { return attrs_; }     // Project, GroupCount
    const std::string& new_attr() const { return name_; }                // Extend
    const ArithExpr& expr() const { return *expr_; }                     // Extend
    const std::string& distinct_attr() const { return name_; }           // GroupCount
    const std::string& out_attr() const { return out_attr_; }            // GroupCount
    const Formula& pref() const { return *pref_; }                       // winnow family
    const WinnowOptions& options() const { return opts_; }               // winnow family
    size_t iterations() const { return iterations_; }                    // WinnowIter
    const std::string& label() const { return label_; }                  // winnow family

    // The same node over different inputs; payload re-checked against them.
    PlanPtr with_children(std::vector<PlanPtr> children) const;

    size_t node_count() const;
    std::string text() const;      // one-line plan-expression syntax
    std::string tree_text() const; // indented, one node per line, schemas shown

private:
    Plan() = default;

    PlanOp op_ = PlanOp::Scan;
    Schema schema_;
    std::vector<PlanPtr> children_;
    std::string name_; // scan name / extend column / group-count distinct attr
    std::string out_attr_;
    std::vector<std::string> attrs_;
    std::optional<Formula> condition_;
    std::optional<ArithExpr> expr_;
    std::optional<Formula> pref_;
    WinnowOptions opts_{};
    size_t iterations_ = 0;
    std::string label_;
};

// The winnow-family execution knobs applied to every node of the tree;
// formulas and structure are untouched.
PlanPtr apply_options(const PlanPtr& plan, const WinnowOptions& opts);

using Catalog = std::map<std::string, Relation>;

// Executes the plan bottom-up with set semantics.
Relation evaluate(const PlanPtr& plan, const Catalog& catalog);

} // namespace prefq

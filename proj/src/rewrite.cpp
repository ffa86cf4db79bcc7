#include "prefq/rewrite.hpp"

#include "prefq/compose.hpp"
#include "prefq/errors.hpp"
#include "prefq/props.hpp"

#include <map>
#include <optional>
#include <set>
#include <utility>

namespace prefq {

namespace {

const std::vector<std::string> kVars{"t1", "t2"};

std::string path_text(const std::vector<size_t>& path) {
    if (path.empty()) return "/";
    std::string out;
    for (size_t i : path) out += "/" + std::to_string(i);
    return out;
}

PlanPtr node_at(const PlanPtr& root, const std::vector<size_t>& path) {
    PlanPtr cur = root;
    for (size_t i : path) cur = cur->child(i);
    return cur;
}

PlanPtr replace_at(const PlanPtr& root, const std::vector<size_t>& path, size_t depth,
                   const PlanPtr& node) {
    if (depth == path.size()) return node;
    std::vector<PlanPtr> kids = root->children();
    kids[path[depth]] = replace_at(kids[path[depth]], path, depth + 1, node);
    return root->with_children(std::move(kids));
}

void collect_paths(const PlanPtr& node, std::vector<size_t>& cur,
                   std::vector<std::vector<size_t>>& out) {
    out.push_back(cur);
    for (size_t i = 0; i < node->children().size(); ++i) {
        cur.push_back(i);
        collect_paths(node->child(i), cur, out);
        cur.pop_back();
    }
}

std::string assignment_text(const solver::Assignment& a) {
    std::string out;
    for (const auto& [k, v] : a) {
        if (!out.empty()) out += ", ";
        out += k.text() + " = " + v.literal();
    }
    return out;
}

std::string tuples_text(const std::vector<Tuple>& ts) {
    std::string out;
    for (const Tuple& t : ts) {
        if (!out.empty()) out += ", ";
        out += t.display();
    }
    return out;
}

// First violated strict-partial-order property, if any.
std::optional<std::pair<std::string, std::string>> spo_failure(const Formula& f,
                                                               const Budget& budget) {
    PropertyReport rep = check_properties(f, budget);
    const std::pair<const char*, const PropertyCheck*> checks[] = {
        {"irreflexive", &rep.irreflexive},
        {"asymmetric", &rep.asymmetric},
        {"transitive", &rep.transitive},
    };
    for (const auto& [name, check] : checks)
        if (!check->holds) return std::make_pair(std::string(name), tuples_text(check->witness));
    return std::nullopt;
}

struct Attempt {
    PlanPtr replacement;             // null when the rule does not fire
    std::vector<TraceEntry> entries; // the applied entry, or refusal entries
};

// Nested winnows collapse when one formula entails the other and both are
// strict partial orders; the winnow on the entailed (weaker) side decides
// the result.
Attempt try_absorb(const PlanPtr& node, const std::string& loc, const Budget& budget) {
    Attempt out;
    if (node->op() != PlanOp::Winnow) return out;
    const PlanPtr& inner = node->child();
    if (inner->op() != PlanOp::Winnow) return out;
    const Formula& outer_f = node->pref();
    const Formula& inner_f = inner->pref();
    const Schema& schema = outer_f.schema();

    struct Direction {
        const Formula* from;
        const Formula* to;
        PlanPtr kept;
        const char* note;
    };
    const Direction dirs[] = {
        {&outer_f, &inner_f, inner, "kept the inner winnow"},
        {&inner_f, &outer_f,
         Plan::winnow(outer_f, inner->child(), node->options(), node->label()),
         "kept the outer winnow"},
    };

    for (const Direction& dir : dirs) {
        TraceEntry e;
        e.rule = Rule::AbsorbWinnow;
        e.location = loc;
        e.precondition = "forall t1,t2: (" + dnf_text(dir.from->instantiate(kVars)) + ") -> (" +
                         dnf_text(dir.to->instantiate(kVars)) +
                         "), with both preferences strict partial orders";
        try {
            auto imp = solver::implies(dir.from->instantiate(kVars), dir.to->instantiate(kVars),
                                       schema, budget);
            if (!imp.implied) {
                e.verdict = "invalid";
                e.detail = "implication counterexample: " + assignment_text(imp.counterexample);
                e.counterexample = imp.counterexample;
                out.entries.push_back(std::move(e));
                continue;
            }
            bool broken = false;
            for (const Formula* f : {&outer_f, &inner_f}) {
                if (auto fail = spo_failure(*f, budget)) {
                    e.verdict = "invalid";
                    e.detail = std::string(f == &outer_f ? "outer" : "inner") +
                               " preference is not " + fail->first + ": witness " + fail->second;
                    out.entries.push_back(std::move(e));
                    broken = true;
                    break;
                }
            }
            if (broken) continue;
            e.verdict = "valid";
            e.applied = true;
            e.detail = dir.note;
            out.entries = {std::move(e)};
            out.replacement = dir.kept;
            return out;
        } catch (const BudgetError& be) {
            e.verdict = "budget-exceeded";
            e.detail = be.what();
            out.entries.push_back(std::move(e));
        }
    }
    return out;
}

// A selection commutes with winnow (and rank) when no tuple passing the
// selection can be dominated by a tuple failing it.
Attempt try_push_selection(const PlanPtr& node, const std::string& loc, const Budget& budget) {
    Attempt out;
    if (node->op() != PlanOp::Select) return out;
    const PlanPtr& w = node->child();
    if (w->op() != PlanOp::Winnow && w->op() != PlanOp::Rank) return out;
    const Formula& c2 = w->pref();
    const Schema& base = c2.schema();

    Formula c1 = node->condition();
    if (w->op() == PlanOp::Rank) {
        // only selections ignoring the rank column can move below the rank
        const std::string& rank_col = w->schema().attrs().back().name;
        for (const auto& conj : c1.dnf())
            for (const auto& atom : conj)
                for (const Term* t : {&atom.lhs, &atom.rhs})
                    if (t->is_attr() && t->attr_name == rank_col) return out;
        c1 = Formula(base, c1.vars(), c1.dnf());
    }

    const std::vector<std::string> v1{"t1"}, v2{"t2"};
    TraceEntry e;
    e.rule = Rule::PushSelection;
    e.location = loc;
    e.precondition = "forall t1,t2: ((" + dnf_text(c1.instantiate(v2)) + ") and (" +
                     dnf_text(c2.instantiate(kVars)) + ")) -> (" + dnf_text(c1.instantiate(v1)) +
                     ")";
    try {
        Dnf lhs = dnf_and(c1.instantiate(v2), c2.instantiate(kVars), budget);
        auto imp = solver::implies(lhs, c1.instantiate(v1), base, budget);
        if (imp.implied) {
            e.verdict = "valid";
            e.applied = true;
            e.detail = std::string("selection pushed below ") + plan_op_name(w->op());
            out.entries = {std::move(e)};
            out.replacement = w->with_children({Plan::select(c1, w->child())});
        } else {
            e.verdict = "invalid";
            e.detail = "counterexample: " + assignment_text(imp.counterexample);
            e.counterexample = imp.counterexample;
            out.entries = {std::move(e)};
        }
    } catch (const BudgetError& be) {
        e.verdict = "budget-exceeded";
        e.detail = be.what();
        out.entries = {std::move(e)};
    }
    return out;
}

// A projection commutes with winnow when dominance neither depends on the
// dropped attributes of the dominator nor of the dominated tuple (two
// transfer sentences); the pushed winnow uses the preference restricted to
// the kept attributes.
Attempt try_push_projection(const PlanPtr& node, const std::string& loc, const Budget& budget) {
    Attempt out;
    if (node->op() != PlanOp::Project) return out;
    const PlanPtr& w = node->child();
    if (w->op() != PlanOp::Winnow) return out;
    const std::vector<std::string>& X = node->attrs();
    const Formula& c = w->pref();
    const Schema& R = c.schema();

    auto F = [&c](const char* u, const char* v) {
        const std::vector<std::string> vars{u, v};
        return BoolExpr::from_dnf(c.instantiate(vars));
    };
    auto eqX = [&R, &X](const char* u, const char* v) {
        return BoolExpr::from_dnf(Dnf{tuple_eq_conjunct(R, u, v, X)});
    };
    auto implication = [](BoolExpr lhs, BoolExpr rhs) {
        return BoolExpr::disj({BoolExpr::negation(std::move(lhs)), std::move(rhs)});
    };

    TraceEntry e;
    e.rule = Rule::PushProjection;
    e.location = loc;
    e.precondition =
        "forall t1,t2,t3,t4: ((t1[X] = t2[X] and t1[X] <> t3[X] and C(t1, t3)) -> C(t2, t3)) "
        "and ((t3[X] = t4[X] and t1[X] <> t3[X] and C(t1, t3)) -> C(t1, t4)), X = (" +
        [&X] {
            std::string s;
            for (size_t i = 0; i < X.size(); ++i) s += (i ? ", " : "") + X[i];
            return s;
        }() +
        "), C(t1, t2) = (" + dnf_text(c.instantiate(kVars)) + ")";
    try {
        BoolExpr s1 = implication(
            BoolExpr::conj({eqX("t1", "t2"), BoolExpr::negation(eqX("t1", "t3")), F("t1", "t3")}),
            F("t2", "t3"));
        BoolExpr s2 = implication(
            BoolExpr::conj({eqX("t3", "t4"), BoolExpr::negation(eqX("t1", "t3")), F("t1", "t3")}),
            F("t1", "t4"));
        auto res = solver::valid(BoolExpr::conj({std::move(s1), std::move(s2)}), R, budget);
        if (!res.valid) {
            e.verdict = "invalid";
            e.detail = "counterexample: " + assignment_text(res.counterexample);
            e.counterexample = res.counterexample;
            out.entries = {std::move(e)};
            return out;
        }
        Formula theta = X.size() == R.arity() ? Formula(node->schema(), c.vars(), c.dnf())
                                              : restrict_to(c, X, budget);
        e.verdict = "valid";
        e.applied = true;
        e.detail = "projection pushed; preference restricted to the kept attributes";
        out.entries = {std::move(e)};
        out.replacement =
            Plan::winnow(std::move(theta), Plan::project(X, w->child()), w->options());
    } catch (const BudgetError& be) {
        e.verdict = "budget-exceeded";
        e.detail = be.what();
        out.entries = {std::move(e)};
    }
    return out;
}

struct Decomposition {
    std::optional<std::pair<Formula, Formula>> factors;
    solver::Assignment counterexample;
};

// Recovers per-factor preferences from a product-schema formula by pinning
// the other factor's components equal and eliminating them, then verifies
// that their componentwise composition is equivalent to the original.
Decomposition decompose_pareto(const Formula& c0, const Schema& s1, const Schema& s2,
                               const Budget& budget) {
    Decomposition result;
    const Schema& prod = c0.schema();
    size_t split = s1.arity();

    std::vector<std::string> left_names, right_names;
    for (size_t i = 0; i < split; ++i) left_names.push_back(prod.at(i).name);
    for (size_t i = split; i < prod.arity(); ++i) right_names.push_back(prod.at(i).name);

    Dnf base = c0.instantiate(kVars);
    auto factor = [&](const std::vector<std::string>& pin) {
        Dnf pinned = solver::prune_unsat(
            dnf_and(base, Dnf{tuple_eq_conjunct(prod, kVars[0], kVars[1], pin)}, budget), prod);
        std::vector<solver::VarKey> kill;
        for (const std::string& a : pin) {
            kill.push_back({kVars[0], a});
            kill.push_back({kVars[1], a});
        }
        return solver::eliminate_vars(pinned, kill, prod, budget);
    };

    try {
        Dnf left_dnf = factor(right_names);
        Dnf right_dnf = factor(left_names);

        std::map<std::string, std::string> back;
        for (size_t i = 0; i < right_names.size(); ++i)
            if (right_names[i] != s2.at(i).name) back[right_names[i]] = s2.at(i).name;

        Formula c1(s1, kVars, std::move(left_dnf));
        Formula c2(s2, kVars, rename_attributes(std::move(right_dnf), back));
        Formula candidate = pareto(c1, c2, budget);

        auto fwd =
            solver::implies(base, candidate.instantiate(kVars), prod, budget);
        if (!fwd.implied) {
            result.counterexample = fwd.counterexample;
            return result;
        }
        auto bwd =
            solver::implies(candidate.instantiate(kVars), base, prod, budget);
        if (!bwd.implied) {
            result.counterexample = bwd.counterexample;
            return result;
        }
        result.factors = std::make_pair(std::move(c1), std::move(c2));
    } catch (const SchemaError&) {
        // leftover cross-factor constraints: not componentwise
    }
    return result;
}

// A winnow distributes over a product exactly when its preference is the
// componentwise (Pareto) composition of preferences on the factors.
Attempt try_distribute_product(const PlanPtr& node, const std::string& loc, const Budget& budget) {
    Attempt out;
    if (node->op() != PlanOp::Winnow) return out;
    const PlanPtr& prod = node->child();
    if (prod->op() != PlanOp::Product) return out;
    const Formula& c0 = node->pref();
    const PlanPtr& e1 = prod->child(0);
    const PlanPtr& e2 = prod->child(1);

    TraceEntry e;
    e.rule = Rule::DistributeProduct;
    e.location = loc;
    e.precondition = "C0 is the componentwise composition of factor preferences, C0(t1, t2) = (" +
                     dnf_text(c0.instantiate(kVars)) + ")";

    auto fire = [&](const Formula& c1, const Formula& c2, const char* how) {
        e.verdict = "valid";
        e.applied = true;
        e.detail = how;
        out.entries = {std::move(e)};
        out.replacement = Plan::product(Plan::winnow(c1, e1, node->options()),
                                        Plan::winnow(c2, e2, node->options()));
    };

    const auto& parts = c0.pareto_parts();
    if (parts && parts->split == e1->schema().arity() &&
        parts->left->schema() == e1->schema() && parts->right->schema() == e2->schema()) {
        fire(*parts->left, *parts->right, "composition provenance");
        return out;
    }

    try {
        Decomposition dec = decompose_pareto(c0, e1->schema(), e2->schema(), budget);
        if (dec.factors) {
            fire(dec.factors->first, dec.factors->second, "factors recovered structurally");
            return out;
        }
        e.verdict = "invalid";
        e.detail = dec.counterexample.empty()
                       ? std::string("no componentwise decomposition found")
                       : "not equivalent to the recovered composition, counterexample: " +
                             assignment_text(dec.counterexample);
        e.counterexample = dec.counterexample;
        out.entries = {std::move(e)};
    } catch (const BudgetError& be) {
        e.verdict = "budget-exceeded";
        e.detail = be.what();
        out.entries = {std::move(e)};
    }
    return out;
}

// Winnow distributes over union and difference only for the empty
// preference relation (then it is the identity on both sides).
Attempt try_distribute_union_diff(const PlanPtr& node, const std::string& loc,
                                  const Budget& budget) {
    Attempt out;
    if (node->op() != PlanOp::Winnow) return out;
    const PlanPtr& u = node->child();
    if (u->op() != PlanOp::Union && u->op() != PlanOp::Diff) return out;
    const Formula& c = node->pref();

    TraceEntry e;
    e.rule = Rule::DistributeUnionDiff;
    e.location = loc;
    e.precondition =
        "forall t1,t2: not (" + dnf_text(c.instantiate(kVars)) + ")  [empty preference]";
    (void)budget;

    auto sat = solver::satisfiable(c.instantiate(kVars), c.schema());
    if (sat.sat) {
        e.verdict = "invalid";
        e.detail = "preferred pair exists: " + assignment_text(sat.assignment);
        e.counterexample = sat.assignment;
        out.entries = {std::move(e)};
        return out;
    }

    // the right operand may use different attribute names
    const Schema& rs = u->child(1)->schema();
    std::map<std::string, std::string> renaming;
    for (size_t i = 0; i < rs.arity(); ++i)
        if (c.schema().at(i).name != rs.at(i).name)
            renaming[c.schema().at(i).name] = rs.at(i).name;
    Formula right_c(rs, c.vars(), rename_attributes(c.dnf(), renaming));

    e.verdict = "valid";
    e.applied = true;
    e.detail = std::string("winnow distributed over ") + plan_op_name(u->op());
    out.entries = {std::move(e)};
    out.replacement =
        u->with_children({Plan::winnow(c, u->child(0), node->options(), node->label()),
                          Plan::winnow(std::move(right_c), u->child(1), node->options(),
                                       node->label())});
    return out;
}

Attempt try_rule(Rule rule, const PlanPtr& node, const std::string& loc, const Budget& budget) {
    switch (rule) {
    case Rule::AbsorbWinnow:
        return try_absorb(node, loc, budget);
    case Rule::PushSelection:
        return try_push_selection(node, loc, budget);
    case Rule::PushProjection:
        return try_push_projection(node, loc, budget);
    case Rule::DistributeProduct:
        return try_distribute_product(node, loc, budget);
    default:
        return try_distribute_union_diff(node, loc, budget);
    }
}

} // namespace

const char* rule_name(Rule r) {
    switch (r) {
    case Rule::AbsorbWinnow:
        return "absorb-winnow";
    case Rule::PushSelection:
        return "push-selection";
    case Rule::PushProjection:
        return "push-projection";
    case Rule::DistributeProduct:
        return "distribute-product";
    default:
        return "distribute-union-diff";
    }
}

std::vector<Rule> all_rules() {
    return {Rule::AbsorbWinnow, Rule::PushSelection, Rule::PushProjection,
            Rule::DistributeProduct, Rule::DistributeUnionDiff};
}

OptimizeResult optimize(const PlanPtr& plan, std::span<const Rule> rules, const Budget& budget) {
    OptimizeResult res;
    res.plan = plan;

    size_t guard = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (Rule rule : rules) {
            bool fired = true;
            while (fired) {
                if (++guard > 10000) throw EngineError("plan rewriting did not reach a fixpoint");
                fired = false;
                std::vector<std::vector<size_t>> paths;
                std::vector<size_t> cur;
                collect_paths(res.plan, cur, paths);
                for (const auto& path : paths) {
                    Attempt a = try_rule(rule, node_at(res.plan, path), path_text(path), budget);
                    if (!a.replacement) continue;
                    res.plan = replace_at(res.plan, path, 0, a.replacement);
                    for (auto& e : a.entries) res.trace.push_back(std::move(e));
                    fired = true;
                    changed = true;
                    break;
                }
            }
        }
    }

    // refusals, reported against the final plan
    std::vector<std::vector<size_t>> paths;
    std::vector<size_t> cur;
    collect_paths(res.plan, cur, paths);
    for (Rule rule : rules)
        for (const auto& path : paths) {
            Attempt a = try_rule(rule, node_at(res.plan, path), path_text(path), budget);
            if (a.replacement) continue;
            for (auto& e : a.entries) res.trace.push_back(std::move(e));
        }
    return res;
}

OptimizeResult optimize(const PlanPtr& plan, const Budget& budget) {
    auto rules = all_rules();
    return optimize(plan, rules, budget);
}

namespace {

// One winnow turned into select/product/union/difference per its formula's
// disjuncts: dominator-side atoms select the left copy, dominated-side
// atoms the right copy, mixed atoms filter their product, and dominated
// rows are subtracted from the input.
PlanPtr expand_node(const PlanPtr& w) {
    const PlanPtr& e = w->child();
    const Formula& c = w->pref();
    const Schema& S = e->schema();
    const Dnf& d = c.dnf();
    if (d.empty()) return Plan::set_difference(e, Plan::set_difference(e, e));

    Schema prod = product_schema(S, S);
    const std::string& v1 = c.vars()[0];
    const std::string& v2 = c.vars()[1];
    std::vector<std::string> right_names;
    std::map<std::string, std::string> to_right;
    for (size_t i = 0; i < S.arity(); ++i) {
        right_names.push_back(prod.at(S.arity() + i).name);
        to_right[S.at(i).name] = right_names.back();
    }

    PlanPtr acc;
    for (const Conjunct& disjunct : d) {
        Conjunct phi, psi, gamma;
        for (const Atom& a : disjunct) {
            bool uses1 = (a.lhs.is_attr() && a.lhs.var == v1) || (a.rhs.is_attr() && a.rhs.var == v1);
            bool uses2 = (a.lhs.is_attr() && a.lhs.var == v2) || (a.rhs.is_attr() && a.rhs.var == v2);
            if (uses1 && uses2)
                gamma.push_back(a);
            else if (uses2)
                psi.push_back(a);
            else
                phi.push_back(a);
        }

        PlanPtr dominator = e;
        if (!phi.empty())
            dominator = Plan::select(
                Formula(S, {"t"}, normalize_dnf({solver::rename_conjunct(phi, {{v1, "t"}})})), e);
        PlanPtr dominated = e;
        if (!psi.empty())
            dominated = Plan::select(
                Formula(S, {"t"}, normalize_dnf({solver::rename_conjunct(psi, {{v2, "t"}})})), e);

        PlanPtr joined = Plan::product(dominator, dominated);
        if (!gamma.empty()) {
            Conjunct mixed;
            for (Atom a : gamma) {
                for (Term* t : {&a.lhs, &a.rhs}) {
                    if (!t->is_attr()) continue;
                    if (t->var == v2) t->attr_name = to_right.at(t->attr_name);
                    t->var = "t";
                }
                mixed.push_back(orient_atom(std::move(a)));
            }
            joined = Plan::select(Formula(prod, {"t"}, normalize_dnf({std::move(mixed)})), joined);
        }
        acc = acc ? Plan::set_union(std::move(acc), std::move(joined)) : std::move(joined);
    }

    return Plan::set_difference(e, Plan::project(right_names, std::move(acc)));
}

} // namespace

PlanPtr expand_winnow(const PlanPtr& plan) {
    std::vector<PlanPtr> kids;
    for (const auto& ch : plan->children()) kids.push_back(expand_winnow(ch));
    PlanPtr rebuilt = plan->children().empty() ? plan : plan->with_children(std::move(kids));
    return rebuilt->op() == PlanOp::Winnow ? expand_node(rebuilt) : rebuilt;
}

PlanPtr diff_via_winnow(const PlanPtr& left, const PlanPtr& right) {
    if (!left->schema().compatible(right->schema()))
        throw SchemaError("difference operands have incompatible schemas " +
                          left->schema().text() + " and " + right->schema().text());

    std::string tag = "tag";
    while (left->schema().has(tag) || right->schema().has(tag)) tag += "_";

    std::vector<std::string> base_names;
    for (const auto& a : left->schema().attrs()) base_names.push_back(a.name);

    PlanPtr tagged = Plan::set_union(Plan::extend(tag, ArithExpr::constant(1), left),
                                     Plan::extend(tag, ArithExpr::constant(0), right));
    const Schema& S = tagged->schema();

    // the 0-tagged twin of an equal row wins
    Conjunct twin = tuple_eq_conjunct(S, kVars[0], kVars[1], base_names);
    twin.push_back(orient_atom({Term::attr(kVars[0], tag), CmpOp::Eq, Term::constant(Value::num(0L))}));
    twin.push_back(orient_atom({Term::attr(kVars[1], tag), CmpOp::Eq, Term::constant(Value::num(1L))}));
    Formula c5(S, kVars, normalize_dnf({std::move(twin)}));

    Formula keep(S, {"t"},
                 normalize_dnf({{orient_atom(
                     {Term::attr("t", tag), CmpOp::Ne, Term::constant(Value::num(0L))})}}));

    return Plan::project(base_names,
                         Plan::select(std::move(keep), Plan::winnow(std::move(c5), tagged)));
}

} // namespace prefq

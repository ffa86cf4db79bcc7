#include "prefq/compose.hpp"

#include "prefq/errors.hpp"
#include "prefq/props.hpp"
#include "prefq/solver.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <utility>

namespace prefq {

using solver::canonicalize;
using solver::ConstraintSet;
using solver::rename_conjunct;
using solver::VarKey;

namespace {

const std::vector<std::string> kPrefVars{"t1", "t2"};

void require_same_schema(const Formula& c1, const Formula& c2) {
    if (!(c1.schema() == c2.schema()))
        throw SchemaError("composed preference formulas must share a schema: " +
                          c1.schema().text() + " vs " + c2.schema().text());
}

Formula make_pref(Schema schema, Dnf dnf) {
    return Formula(std::move(schema), kPrefVars, std::move(dnf));
}

// Renames attribute references (in every tuple variable) per the map.
// Existentially eliminates every listed flat variable from each disjunct,
// deduplicating by canonical key.
std::vector<ConstraintSet> eliminate_all(std::vector<ConstraintSet> sets,
                                         const std::vector<VarKey>& kill, const Budget& budget) {
    for (const auto& v : kill) {
        std::vector<ConstraintSet> next;
        std::set<std::string> keys;
        for (const auto& cs : sets)
            for (auto& piece : cs.eliminate(v)) {
                if (piece.unsat()) continue;
                if (!keys.insert(piece.key()).second) continue;
                budget.charge(next.size() + 1);
                next.push_back(std::move(piece));
            }
        sets = std::move(next);
    }
    return sets;
}

std::vector<ConstraintSet> to_sets(const Dnf& d, const Schema& schema) {
    std::vector<ConstraintSet> sets;
    std::set<std::string> keys;
    for (const auto& conj : d) {
        ConstraintSet cs = canonicalize(conj, schema);
        if (cs.unsat()) continue;
        if (keys.insert(cs.key()).second) sets.push_back(std::move(cs));
    }
    return sets;
}

Dnf to_dnf(const std::vector<ConstraintSet>& sets) {
    Dnf out;
    for (const auto& cs : sets) out.push_back(cs.atoms());
    return normalize_dnf(std::move(out));
}

std::string fresh_name(const std::string& base, const std::vector<std::string>& taken) {
    std::string name = base;
    while (std::find(taken.begin(), taken.end(), name) != taken.end()) name += "_";
    return name;
}

} // namespace

Formula boolean_compose(SetOp op, const Formula& c1, const Formula& c2, const Budget& budget) {
    require_same_schema(c1, c2);
    Dnf a = c1.instantiate(kPrefVars);
    Dnf b = c2.instantiate(kPrefVars);
    Dnf out;
    switch (op) {
    case SetOp::Union:
        out = dnf_or(std::move(a), b, budget);
        break;
    case SetOp::Intersection:
        out = dnf_and(a, b, budget);
        break;
    case SetOp::Difference: {
        Formula nb = negate(make_pref(c2.schema(), std::move(b)), budget);
        out = dnf_and(a, nb.dnf(), budget);
        break;
    }
    }
    return make_pref(c1.schema(), std::move(out));
}

Formula prioritized(const Formula& c1, const Formula& c2, const Budget& budget) {
    require_same_schema(c1, c2);
    Dnf a = c1.instantiate(kPrefVars);
    Dnf b = c2.instantiate(kPrefVars);
    Formula first = make_pref(c1.schema(), std::move(a));
    Dnf no_reverse = negate(swap_vars(first), budget).dnf();
    Dnf out = dnf_or(first.dnf(), dnf_and(no_reverse, b, budget), budget);
    return make_pref(c1.schema(), std::move(out));
}

Formula pareto(const Formula& c1, const Formula& c2, const Budget& budget) {
    const Schema& left = c1.schema();
    const Schema& right = c2.schema();
    Schema product = product_schema(left, right);

    std::map<std::string, std::string> renaming;
    std::vector<std::string> left_names, right_names;
    for (const auto& a : left.attrs()) left_names.push_back(a.name);
    for (size_t i = 0; i < right.arity(); ++i) {
        const std::string& name = product.at(left.arity() + i).name;
        if (name != right.at(i).name) renaming[right.at(i).name] = name;
        right_names.push_back(name);
    }

    Dnf better_left = c1.instantiate(kPrefVars);
    Dnf better_right = rename_attributes(c2.instantiate(kPrefVars), renaming);
    Dnf eq_left{tuple_eq_conjunct(product, kPrefVars[0], kPrefVars[1], left_names)};
    Dnf eq_right{tuple_eq_conjunct(product, kPrefVars[0], kPrefVars[1], right_names)};

    Dnf at_least_left = dnf_or(better_left, eq_left, budget);
    Dnf at_least_right = dnf_or(better_right, eq_right, budget);
    Dnf strictly = dnf_or(better_left, better_right, budget);
    Dnf out = dnf_and(dnf_and(at_least_left, at_least_right, budget), strictly, budget);

    Formula f = make_pref(product, std::move(out));
    auto parts = std::make_shared<ParetoParts>();
    parts->left = std::make_shared<Formula>(c1);
    parts->right = std::make_shared<Formula>(c2);
    parts->split = left.arity();
    f.set_pareto_parts(std::move(parts));
    return f;
}

Formula restrict_to(const Formula& c, std::span<const std::string> attrs, const Budget& budget) {
    const Schema& full = c.schema();
    Schema sub = project_schema(full, attrs);
    const std::string& v1 = c.vars().at(0);
    const std::string& v2 = c.vars().at(1);
    std::string u1 = fresh_name("u1", {v1, v2});
    std::string u2 = fresh_name("u2", {v1, v2, u1});

    // not(c) linked to the restricted tuples on the kept attributes; the
    // full-tuple variables are then projected out, and the final negation
    // turns "some agreeing pair is unordered" into "every pair is ordered".
    Dnf body = negate(c, budget).dnf();
    Conjunct link;
    for (const auto& name : attrs) {
        link.push_back(orient_atom({Term::attr(v1, name), CmpOp::Eq, Term::attr(u1, name)}));
        link.push_back(orient_atom({Term::attr(v2, name), CmpOp::Eq, Term::attr(u2, name)}));
    }
    body = dnf_and(body, Dnf{std::move(link)}, budget);

    std::vector<VarKey> kill;
    for (const auto& a : full.attrs()) {
        kill.push_back({v1, a.name});
        kill.push_back({v2, a.name});
    }
    Dnf reachable = to_dnf(eliminate_all(to_sets(body, full), kill, budget));

    Formula some_pair_unordered(sub, {u1, u2}, std::move(reachable));
    Formula theta = negate(some_pair_unordered, budget);
    return make_pref(sub, theta.instantiate(kPrefVars));
}

Formula transitive_closure(const Formula& c, const Budget& budget) {
    const Schema& schema = c.schema();
    const std::string& x = c.vars().at(0);
    const std::string& y = c.vars().at(1);
    std::string z = fresh_name("z", {x, y});
    std::vector<VarKey> mid;
    for (const auto& a : schema.attrs()) mid.push_back({z, a.name});

    std::vector<ConstraintSet> sets = to_sets(c.dnf(), schema);
    std::set<std::string> keys;
    for (const auto& cs : sets) keys.insert(cs.key());

    std::deque<std::pair<size_t, size_t>> work;
    for (size_t i = 0; i < sets.size(); ++i)
        for (size_t j = 0; j < sets.size(); ++j) work.emplace_back(i, j);

    while (!work.empty()) {
        auto [i, j] = work.front();
        work.pop_front();
        Conjunct merged = rename_conjunct(sets[i].atoms(), {{y, z}});
        for (auto& atom : rename_conjunct(sets[j].atoms(), {{x, z}}))
            merged.push_back(std::move(atom));
        ConstraintSet chained = canonicalize(merged, schema);
        if (chained.unsat()) continue;
        for (auto& piece : eliminate_all({chained}, mid, budget)) {
            if (!keys.insert(piece.key()).second) continue;
            budget.charge(sets.size() + 1);
            size_t n = sets.size();
            sets.push_back(std::move(piece));
            for (size_t k = 0; k <= n; ++k) {
                work.emplace_back(n, k);
                work.emplace_back(k, n);
            }
        }
    }
    Formula closed(schema, {x, y}, to_dnf(sets));
    return make_pref(schema, closed.instantiate(kPrefVars));
}

Formula strict_core(const Formula& c, const Budget& budget, bool force) {
    if (!force) {
        PropertyReport report = check_properties(c, budget);
        if (!report.transitive.holds) {
            std::string witness;
            for (const auto& t : report.transitive.witness) {
                if (!witness.empty()) witness += ", ";
                witness += t.display();
            }
            throw GateError("strict core requires a transitive preference relation; formula " +
                                c.text() + " is not transitive (witness chain: " + witness + ")",
                            "transitive", witness);
        }
    }
    Dnf keep = c.instantiate(kPrefVars);
    Formula base = make_pref(c.schema(), keep);
    Dnf no_reverse = negate(swap_vars(base), budget).dnf();
    return make_pref(c.schema(), dnf_and(base.dnf(), no_reverse, budget));
}

Formula skyline_formula(const SkylineClause& clause, const Schema& schema, const Budget& budget) {
    if (clause.entries.empty()) throw SchemaError("skyline clause needs at least one attribute");
    Conjunct base;
    std::vector<const SkylineEntry*> strict;
    std::set<std::string> seen;
    for (const auto& e : clause.entries) {
        Sort sort = schema.sort_of(e.attr);
        if (!seen.insert(e.attr).second)
            throw SchemaError("duplicate skyline attribute " + e.attr);
        Term lhs = Term::attr(kPrefVars[0], e.attr);
        Term rhs = Term::attr(kPrefVars[1], e.attr);
        switch (e.mode) {
        case SkyMode::Diff:
            base.push_back(orient_atom({lhs, CmpOp::Eq, rhs}));
            break;
        case SkyMode::Max:
        case SkyMode::Min:
            if (sort != Sort::Num)
                throw SchemaError("skyline " + std::string(e.mode == SkyMode::Max ? "max" : "min") +
                                  " needs a num attribute, got " + e.attr);
            base.push_back(orient_atom({lhs, e.mode == SkyMode::Max ? CmpOp::Ge : CmpOp::Le, rhs}));
            strict.push_back(&e);
            break;
        }
    }
    if (strict.empty()) throw SchemaError("skyline clause needs at least one min or max entry");
    Dnf out;
    for (const SkylineEntry* e : strict) {
        Conjunct d = base;
        d.push_back(orient_atom({Term::attr(kPrefVars[0], e->attr),
                                 e->mode == SkyMode::Max ? CmpOp::Gt : CmpOp::Lt,
                                 Term::attr(kPrefVars[1], e->attr)}));
        out.push_back(std::move(d));
    }
    budget.charge(out.size());
    return make_pref(schema, normalize_dnf(std::move(out)));
}

Formula scoring_formula(const ScoringSpec& spec, const Schema& schema) {
    if (spec.slack < 0) throw SchemaError("scoring slack must be nonnegative");
    if (schema.sort_of(spec.score_attr) != Sort::Num)
        throw SchemaError("score attribute " + spec.score_attr + " must be num");
    std::string lhs_attr = spec.score_attr;
    if (spec.slack > 0) {
        lhs_attr += "_minus_d";
        if (!schema.has(lhs_attr))
            throw SchemaError("scoring with slack needs the derived column " + lhs_attr +
                              "; extend the relation with " + spec.score_attr + " - " +
                              decimal_string(spec.slack) + " first");
        if (schema.sort_of(lhs_attr) != Sort::Num)
            throw SchemaError("derived score column " + lhs_attr + " must be num");
    }
    Conjunct d{
        orient_atom({Term::attr(kPrefVars[0], lhs_attr), CmpOp::Gt, Term::attr(kPrefVars[1], spec.score_attr)})};
    return make_pref(schema, Dnf{std::move(d)});
}

} // namespace prefq

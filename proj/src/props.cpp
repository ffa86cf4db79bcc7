#include "prefq/props.hpp"

#include "prefq/errors.hpp"
#include "prefq/solver.hpp"

#include <map>
#include <mutex>
#include <set>
#include <string>

namespace prefq {

using solver::Assignment;
using solver::SatResult;
using solver::VarKey;

namespace {

// Variable names for the property sentences, distinct from the formula's own.
std::vector<std::string> sentence_vars(const Formula& f, size_t n) {
    std::vector<std::string> out;
    std::string suffix;
    auto taken = [&](const std::string& name) {
        for (const auto& v : f.vars())
            if (v == name) return true;
        return false;
    };
    while (out.size() < n) {
        std::string cand = "q" + std::to_string(out.size() + 1) + suffix;
        if (taken(cand)) {
            suffix += "_";
            out.clear();
            continue;
        }
        out.push_back(std::move(cand));
    }
    return out;
}

// Builds concrete tuples from a solver witness; attributes the witness does
// not constrain get fresh values distinct from every constrained one.
std::vector<Tuple> materialize(const Schema& schema, const std::vector<std::string>& vars,
                               const Assignment& assignment) {
    std::set<Rational> used_nums;
    std::set<std::string> used_strs;
    for (const auto& [key, value] : assignment) {
        if (value.sort() == Sort::Num)
            used_nums.insert(value.num());
        else
            used_strs.insert(value.str());
    }
    Rational next_num = 1001;
    size_t next_str = 0;
    auto fresh = [&](Sort sort) {
        if (sort == Sort::Num) {
            while (used_nums.count(next_num)) ++next_num;
            used_nums.insert(next_num);
            return Value::num(next_num);
        }
        std::string s;
        do {
            s = "v" + std::to_string(next_str++);
        } while (used_strs.count(s));
        used_strs.insert(s);
        return Value::str(s);
    };

    std::vector<Tuple> out;
    for (const auto& var : vars) {
        std::vector<Value> cells;
        for (const auto& attr : schema.attrs()) {
            auto it = assignment.find(VarKey{var, attr.name});
            cells.push_back(it != assignment.end() ? it->second : fresh(attr.sort));
        }
        out.emplace_back(std::move(cells));
    }
    return out;
}

PropertyCheck decide(const Dnf& counterexample, const Schema& schema,
                     const std::vector<std::string>& vars) {
    SatResult r = solver::satisfiable(counterexample, schema);
    PropertyCheck check;
    check.holds = !r.sat;
    if (r.sat)
        check.witness = materialize(schema, vars, r.assignment);
    return check;
}

PropertyReport compute(const Formula& f, const Budget& budget) {
    if (!f.is_pref())
        throw SchemaError("property checks need a two-variable preference formula");
    const Schema& schema = f.schema();
    auto vars = sentence_vars(f, 3);
    const auto& a = vars[0];
    const auto& b = vars[1];
    const auto& c = vars[2];

    auto fml = [&](const std::string& v1, const std::string& v2) {
        return f.instantiate(std::vector<std::string>{v1, v2});
    };
    auto neg = [&](const Dnf& d) { return solver::negate_dnf(d, schema, budget); };
    auto land = [&](const Dnf& x, const Dnf& y) {
        return solver::prune_unsat(dnf_and(x, y, budget), schema);
    };

    PropertyReport report;

    // t ≻ t for some t.
    report.irreflexive = decide(fml(a, a), schema, {a});

    // t1 ≻ t2 and t2 ≻ t1.
    report.asymmetric = decide(land(fml(a, b), fml(b, a)), schema, {a, b});

    // t1 ≻ t2, t2 ≻ t3, yet not t1 ≻ t3.
    Dnf chain = land(fml(a, b), fml(b, c));
    report.transitive = decide(land(chain, neg(fml(a, c))), schema, {a, b, c});

    // not t1 ≻ t2, not t2 ≻ t3, yet t1 ≻ t3.
    Dnf gap = land(neg(fml(a, b)), neg(fml(b, c)));
    report.negatively_transitive = decide(land(gap, fml(a, c)), schema, {a, b, c});

    // Distinct, mutually unpreferred tuples; tuple equality expands to
    // agreement on every attribute.
    Dnf unrelated = land(neg(fml(a, b)), neg(fml(b, a)));
    Dnf equal{tuple_eq_conjunct(schema, a, b)};
    report.connected = decide(land(unrelated, neg(equal)), schema, {a, b});

    return report;
}

} // namespace

PropertyReport check_properties(const Formula& f, const Budget& budget) {
    static std::mutex mutex;
    static std::map<std::string, PropertyReport> cache;
    std::string key = f.schema().text() + "|" + f.text();
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    PropertyReport report = compute(f, budget);
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace(std::move(key), report);
    return report;
}

bool indifferent(const Formula& f, const Tuple& t1, const Tuple& t2) {
    check_tuple(f.schema(), t1);
    check_tuple(f.schema(), t2);
    return !dominates(f, t1, t2) && !dominates(f, t2, t1);
}

} // namespace prefq

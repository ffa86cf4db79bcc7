#include "prefq/eval.hpp"

#include "prefq/compose.hpp"
#include "prefq/errors.hpp"
#include "prefq/props.hpp"

#include <algorithm>
#include <deque>

namespace prefq {

namespace {

std::string witness_text(const std::vector<Tuple>& witness) {
    std::string out;
    for (const auto& t : witness) {
        if (!out.empty()) out += ", ";
        out += t.display();
    }
    return out;
}

// Refuses formulas that are not strict partial orders, naming the first
// violated property and a concrete counterexample.
void require_spo(const Formula& c, const std::string& consumer, const Budget& budget) {
    PropertyReport report = check_properties(c, budget);
    const char* property = nullptr;
    const PropertyCheck* failed = nullptr;
    if (!report.irreflexive.holds) {
        property = "irreflexive";
        failed = &report.irreflexive;
    } else if (!report.asymmetric.holds) {
        property = "asymmetric";
        failed = &report.asymmetric;
    } else if (!report.transitive.holds) {
        property = "transitive";
        failed = &report.transitive;
    }
    if (!failed) return;
    std::string witness = witness_text(failed->witness);
    throw GateError(consumer + " requires a strict partial order; formula " + c.text() +
                        " is not " + property + " (witness: " + witness + ")",
                    property, witness);
}

std::vector<Tuple> winnow_oracle(const Evaluator& ev, const std::vector<Tuple>& input) {
    std::vector<Tuple> out;
    for (const Tuple& t : input) {
        bool dominated = false;
        for (const Tuple& other : input)
            if (ev.eval2(other, t)) dominated = true;
        if (!dominated) out.push_back(t);
    }
    return out;
}

std::vector<Tuple> winnow_nl(const Evaluator& ev, const std::vector<Tuple>& input) {
    std::vector<Tuple> out;
    for (const Tuple& t : input) {
        bool dominated = false;
        for (const Tuple& other : input)
            if (ev.eval2(other, t)) {
                dominated = true;
                break;
            }
        if (!dominated) out.push_back(t);
    }
    return out;
}

std::vector<Tuple> winnow_bnl(const Evaluator& ev, const std::vector<Tuple>& input,
                              size_t window) {
    struct Entry {
        Tuple tuple;
        bool ready; // inserted while the temp table was empty
    };
    std::vector<Tuple> out;
    std::vector<Entry> w;
    std::vector<Tuple> in = input;
    while (!in.empty()) {
        // Carried-over tuples have missed exactly the tuples now forming
        // the input, so after this pass they will have seen everything.
        for (auto& e : w) e.ready = true;
        std::vector<Tuple> f;
        for (const Tuple& t : in) {
            bool dominated = false;
            for (const auto& e : w)
                if (ev.eval2(e.tuple, t)) {
                    dominated = true;
                    break;
                }
            if (dominated) continue;
            bool beats_some = false;
            for (const auto& e : w)
                if (ev.eval2(t, e.tuple)) {
                    beats_some = true;
                    break;
                }
            if (beats_some) {
                std::erase_if(w, [&](const Entry& e) { return ev.eval2(t, e.tuple); });
                w.push_back({t, f.empty()});
            } else if (w.size() < window) {
                w.push_back({t, f.empty()});
            } else {
                f.push_back(t);
            }
        }
        std::vector<Entry> keep;
        for (auto& e : w) {
            if (e.ready)
                out.push_back(std::move(e.tuple));
            else
                keep.push_back(std::move(e));
        }
        w = std::move(keep);
        in = std::move(f);
    }
    return out;
}

std::vector<Tuple> winnow_sfs(const Evaluator& ev, const std::vector<Tuple>& input,
                              size_t window) {
    // Dominators must precede dominated tuples, so later input can never
    // invalidate an already windowed tuple.
    size_t n = input.size();
    std::vector<std::vector<size_t>> succ(n);
    std::vector<size_t> indegree(n, 0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (i != j && ev.eval2(input[i], input[j])) {
                succ[i].push_back(j);
                ++indegree[j];
            }
    std::deque<size_t> queue;
    for (size_t i = 0; i < n; ++i)
        if (indegree[i] == 0) queue.push_back(i);
    std::vector<Tuple> sorted;
    while (!queue.empty()) {
        size_t i = queue.front();
        queue.pop_front();
        sorted.push_back(input[i]);
        for (size_t j : succ[i])
            if (--indegree[j] == 0) queue.push_back(j);
    }
    if (sorted.size() < n)
        throw EngineError("sort-filter winnow failed: the dominance relation on the input "
                          "is cyclic, so no topological order exists");

    std::vector<Tuple> out;
    std::vector<Tuple> in = std::move(sorted);
    while (!in.empty()) {
        std::vector<Tuple> w, f;
        for (const Tuple& t : in) {
            bool dominated = false;
            for (const Tuple& kept : w)
                if (ev.eval2(kept, t)) {
                    dominated = true;
                    break;
                }
            if (dominated) continue;
            if (w.size() < window)
                w.push_back(t);
            else
                f.push_back(t);
        }
        out.insert(out.end(), w.begin(), w.end());
        in = std::move(f);
    }
    return out;
}

void check_winnow_input(const Formula& c, const Schema& schema, const WinnowOptions& opts) {
    if (!c.is_pref()) throw SchemaError("winnow needs a two-variable preference formula");
    if (!(c.schema() == schema))
        throw SchemaError("formula schema " + c.schema().text() + " does not match relation " +
                          schema.text());
    if (opts.window == 0) throw EngineError("window must hold at least one tuple");
}

std::string rank_column_name(const Schema& base) {
    std::string name = "rank";
    while (base.has(name)) name += "_";
    return name;
}

} // namespace

Algo parse_algo(const std::string& name) {
    if (name == "oracle") return Algo::Oracle;
    if (name == "nl") return Algo::NL;
    if (name == "bnl") return Algo::BNL;
    if (name == "sfs") return Algo::SFS;
    throw ParseError("unknown algorithm '" + name + "' (expected oracle, nl, bnl, or sfs)");
}

const char* algo_name(Algo a) {
    switch (a) {
    case Algo::Oracle: return "oracle";
    case Algo::NL: return "nl";
    case Algo::BNL: return "bnl";
    case Algo::SFS: return "sfs";
    }
    return "?";
}

std::vector<Tuple> winnow_sequence(const Formula& c, const std::vector<Tuple>& input,
                                   const WinnowOptions& opts) {
    if (!opts.force && (opts.algo == Algo::BNL || opts.algo == Algo::SFS))
        require_spo(c, std::string(algo_name(opts.algo)) + " winnow", opts.budget);
    Evaluator ev(c);
    switch (opts.algo) {
    case Algo::Oracle: return winnow_oracle(ev, input);
    case Algo::NL: return winnow_nl(ev, input);
    case Algo::BNL: return winnow_bnl(ev, input, opts.window);
    case Algo::SFS: return winnow_sfs(ev, input, opts.window);
    }
    return {};
}

Relation winnow(const Formula& c, const Relation& r, const WinnowOptions& opts) {
    check_winnow_input(c, r.schema(), opts);
    return Relation(r.schema(), winnow_sequence(c, r.tuples(), opts));
}

Relation winnow_iter(const Formula& c, const Relation& r, size_t n, const WinnowOptions& opts) {
    if (n == 0) throw EngineError("winnow iteration index starts at 1");
    check_winnow_input(c, r.schema(), opts);
    Relation remaining = r;
    for (size_t i = 1;; ++i) {
        Relation stratum = winnow(c, remaining, opts);
        if (i == n || stratum.empty()) return i == n ? stratum : Relation(r.schema());
        std::vector<Tuple> rest;
        for (const Tuple& t : remaining.tuples())
            if (!stratum.contains(t)) rest.push_back(t);
        remaining = Relation(r.schema(), std::move(rest));
    }
}

Schema ranked_schema(const Schema& s) {
    std::vector<AttributeDef> attrs = s.attrs();
    attrs.push_back({rank_column_name(s), Sort::Num});
    return Schema(std::move(attrs));
}

RankResult rank(const Formula& c, const Relation& r, const WinnowOptions& opts) {
    check_winnow_input(c, r.schema(), opts);
    if (!opts.force) require_spo(c, "rank", opts.budget);

    WinnowOptions inner = opts;
    inner.force = true; // gate already decided above
    RankResult result;
    result.ranked = Relation(ranked_schema(r.schema()));
    result.unranked = Relation(r.schema());

    Relation remaining = r;
    for (size_t stratum_index = 1; !remaining.empty(); ++stratum_index) {
        Relation stratum = winnow(c, remaining, inner);
        if (stratum.empty()) {
            // Only reachable when forced past the gate: nothing is
            // undominated, so the remaining tuples cannot be ranked.
            result.unranked = remaining;
            break;
        }
        for (const Tuple& t : stratum.tuples()) {
            std::vector<Value> cells = t.values();
            cells.push_back(Value::num(Rational(stratum_index)));
            result.ranked.insert(Tuple(std::move(cells)));
        }
        std::vector<Tuple> rest;
        for (const Tuple& t : remaining.tuples())
            if (!stratum.contains(t)) rest.push_back(t);
        remaining = Relation(r.schema(), std::move(rest));
    }
    return result;
}

Relation weak_winnow(const Formula& c, const Relation& r, const WinnowOptions& opts) {
    check_winnow_input(c, r.schema(), opts);
    Formula core = strict_core(c, opts.budget, opts.force);
    WinnowOptions inner = opts;
    inner.force = true; // the strict core of a transitive relation is an SPO
    return winnow(core, r, inner);
}

} // namespace prefq

#include "prefq/solver.hpp"
#include "prefq/errors.hpp"

#include <algorithm>
#include <set>

namespace prefq::solver {

namespace {

constexpr uint8_t REL_NONE = 0, REL_LE = 1, REL_LT = 2;

uint8_t combine(uint8_t a, uint8_t b) {
    if (a == REL_NONE || b == REL_NONE) return REL_NONE;
    return (a == REL_LT || b == REL_LT) ? REL_LT : REL_LE;
}

struct UnionFind {
    std::vector<size_t> parent;
    explicit UnionFind(size_t n) : parent(n) {
        for (size_t i = 0; i < n; ++i) parent[i] = i;
    }
    size_t find(size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(size_t a, size_t b) { parent[find(a)] = find(b); }
};

struct Node {
    bool is_const = false;
    VarKey key;
    Value val;
    Sort sort = Sort::Num;
};

// Canonical node order: variables by (var, attr), then constants by value.
bool node_less(const Node& a, const Node& b) {
    if (a.is_const != b.is_const) return !a.is_const;
    if (!a.is_const) return a.key < b.key;
    return a.val < b.val;
}

} // namespace

ConstraintSet canonicalize(const Conjunct& atoms, const Schema& schema) {
    ConstraintSet cs;
    cs.schema_ = schema;

    std::vector<Node> nodes;
    auto node_of = [&](const Term& t) -> size_t {
        Node n;
        if (t.is_attr()) {
            n.key = VarKey{t.var, t.attr_name};
            n.sort = schema.attrs()[schema.require(t.attr_name)].sort;
        } else {
            n.is_const = true;
            n.val = *t.value;
            n.sort = t.value->sort();
        }
        for (size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].is_const != n.is_const) continue;
            if (n.is_const ? nodes[i].val == n.val : nodes[i].key == n.key) return i;
        }
        nodes.push_back(std::move(n));
        return nodes.size() - 1;
    };

    struct Edge {
        size_t from, to;
        bool strict;
    };
    std::vector<Edge> edges;
    std::vector<std::pair<size_t, size_t>> nes;

    for (const Atom& a : atoms) {
        size_t l = node_of(a.lhs), r = node_of(a.rhs);
        if (nodes[l].sort != nodes[r].sort)
            throw SchemaError("atom '" + a.text() + "' mixes sorts");
        bool order_op = a.op != CmpOp::Eq && a.op != CmpOp::Ne;
        if (order_op && nodes[l].sort != Sort::Num)
            throw SchemaError("atom '" + a.text() + "' orders str terms");
        switch (a.op) {
            case CmpOp::Eq:
                if (l != r) {
                    // handled below through union-find
                }
                break;
            case CmpOp::Ne: nes.emplace_back(l, r); break;
            case CmpOp::Lt: edges.push_back({l, r, true}); break;
            case CmpOp::Le: edges.push_back({l, r, false}); break;
            case CmpOp::Gt: edges.push_back({r, l, true}); break;
            case CmpOp::Ge: edges.push_back({r, l, false}); break;
        }
    }

    UnionFind uf(nodes.size());
    for (const Atom& a : atoms)
        if (a.op == CmpOp::Eq) uf.unite(node_of(a.lhs), node_of(a.rhs));

    // All distinct num constants are strictly ordered by value.
    for (size_t i = 0; i < nodes.size(); ++i)
        for (size_t j = i + 1; j < nodes.size(); ++j) {
            if (!nodes[i].is_const || !nodes[j].is_const) continue;
            if (nodes[i].sort != Sort::Num || nodes[j].sort != Sort::Num) continue;
            if (nodes[i].val < nodes[j].val) edges.push_back({i, j, true});
            else edges.push_back({j, i, true});
        }

    // Group nodes by union-find root.
    std::map<size_t, size_t> root_group;
    std::vector<std::vector<size_t>> group_nodes;
    for (size_t i = 0; i < nodes.size(); ++i) {
        size_t r = uf.find(i);
        auto it = root_group.find(r);
        if (it == root_group.end()) {
            root_group[r] = group_nodes.size();
            group_nodes.push_back({i});
        } else {
            group_nodes[it->second].push_back(i);
        }
    }
    size_t g = group_nodes.size();
    auto group_of = [&](size_t node) { return root_group[uf.find(node)]; };

    // Collapse order cycles: mutual reachability over all order edges.
    std::vector<std::vector<bool>> reach(g, std::vector<bool>(g, false));
    for (size_t i = 0; i < g; ++i) reach[i][i] = true;
    for (const Edge& e : edges) reach[group_of(e.from)][group_of(e.to)] = true;
    for (size_t k = 0; k < g; ++k)
        for (size_t i = 0; i < g; ++i)
            if (reach[i][k])
                for (size_t j = 0; j < g; ++j)
                    if (reach[k][j]) reach[i][j] = true;

    UnionFind guf(g);
    for (size_t i = 0; i < g; ++i)
        for (size_t j = i + 1; j < g; ++j)
            if (reach[i][j] && reach[j][i]) guf.unite(i, j);

    std::map<size_t, size_t> final_of_root;
    std::vector<std::vector<size_t>> cls_nodes; // final class -> node ids
    for (size_t i = 0; i < g; ++i) {
        size_t r = guf.find(i);
        auto it = final_of_root.find(r);
        size_t cid;
        if (it == final_of_root.end()) {
            cid = cls_nodes.size();
            final_of_root[r] = cid;
            cls_nodes.push_back({});
        } else {
            cid = it->second;
        }
        for (size_t n : group_nodes[i]) cls_nodes[cid].push_back(n);
    }
    size_t k = cls_nodes.size();
    auto cls_of = [&](size_t node) { return final_of_root[guf.find(group_of(node))]; };

    auto unsat_result = [&]() {
        ConstraintSet u;
        u.schema_ = schema;
        u.unsat_ = true;
        return u;
    };

    // Per-class checks: a single constant, no strict edge or disequality inside.
    for (size_t c = 0; c < k; ++c) {
        std::optional<Value> constant;
        for (size_t n : cls_nodes[c]) {
            if (!nodes[n].is_const) continue;
            if (constant && !(*constant == nodes[n].val)) return unsat_result();
            constant = nodes[n].val;
        }
    }
    for (const Edge& e : edges)
        if (e.strict && cls_of(e.from) == cls_of(e.to)) return unsat_result();
    for (const auto& [a, b] : nes)
        if (cls_of(a) == cls_of(b)) return unsat_result();

    // Closure matrix over final classes.
    std::vector<std::vector<uint8_t>> rel(k, std::vector<uint8_t>(k, REL_NONE));
    for (const Edge& e : edges) {
        size_t i = cls_of(e.from), j = cls_of(e.to);
        if (i == j) continue; // nonstrict self-loop
        uint8_t s = e.strict ? REL_LT : REL_LE;
        if (s > rel[i][j]) rel[i][j] = s;
    }
    auto close = [&]() {
        for (size_t m = 0; m < k; ++m)
            for (size_t i = 0; i < k; ++i) {
                if (rel[i][m] == REL_NONE) continue;
                for (size_t j = 0; j < k; ++j) {
                    uint8_t c = combine(rel[i][m], rel[m][j]);
                    if (c > rel[i][j]) rel[i][j] = c;
                }
            }
    };
    close();
    for (size_t i = 0; i < k; ++i)
        if (rel[i][i] == REL_LT) return unsat_result();

    // Class-level disequalities; strengthen <= to < where a disequality
    // overlaps an order fact, iterating to a fixpoint.
    std::set<std::pair<size_t, size_t>> ne_set;
    for (const auto& [a, b] : nes) {
        size_t i = cls_of(a), j = cls_of(b);
        ne_set.insert({std::min(i, j), std::max(i, j)});
    }
    auto has_const = [&](size_t c) {
        for (size_t n : cls_nodes[c])
            if (nodes[n].is_const) return true;
        return false;
    };
    auto cls_sort = [&](size_t c) { return nodes[cls_nodes[c].front()].sort; };

    bool changed = true;
    while (changed) {
        changed = false;
        std::set<std::pair<size_t, size_t>> keep;
        for (auto [i, j] : ne_set) {
            if (cls_sort(i) != Sort::Num) {
                if (has_const(i) && has_const(j)) continue; // distinct constants
                keep.insert({i, j});
                continue;
            }
            if (rel[i][j] == REL_LT || rel[j][i] == REL_LT) continue;
            if (rel[i][j] == REL_LE) {
                rel[i][j] = REL_LT;
                changed = true;
                continue;
            }
            if (rel[j][i] == REL_LE) {
                rel[j][i] = REL_LT;
                changed = true;
                continue;
            }
            if (has_const(i) && has_const(j)) continue; // distinct constants
            keep.insert({i, j});
        }
        ne_set = std::move(keep);
        if (changed) {
            close();
            for (size_t i = 0; i < k; ++i)
                if (rel[i][i] == REL_LT) return unsat_result();
        }
    }

    // Canonical class order: by smallest member node.
    std::vector<size_t> order(k);
    for (size_t i = 0; i < k; ++i) order[i] = i;
    auto min_node = [&](size_t c) {
        size_t best = cls_nodes[c][0];
        for (size_t n : cls_nodes[c])
            if (node_less(nodes[n], nodes[best])) best = n;
        return best;
    };
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return node_less(nodes[min_node(a)], nodes[min_node(b)]); });
    std::vector<size_t> pos(k);
    for (size_t i = 0; i < k; ++i) pos[order[i]] = i;

    cs.classes_.resize(k);
    for (size_t c = 0; c < k; ++c) {
        ConstraintSet::Class& cl = cs.classes_[pos[c]];
        cl.sort = cls_sort(c);
        for (size_t n : cls_nodes[c]) {
            if (nodes[n].is_const) cl.constant = nodes[n].val;
            else cl.vars.push_back(nodes[n].key);
        }
        std::sort(cl.vars.begin(), cl.vars.end());
    }
    cs.rel_.assign(k, std::vector<uint8_t>(k, REL_NONE));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) cs.rel_[pos[i]][pos[j]] = rel[i][j];
    for (auto [i, j] : ne_set) {
        size_t a = pos[i], b = pos[j];
        cs.ne_.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(cs.ne_.begin(), cs.ne_.end());
    cs.ne_.erase(std::unique(cs.ne_.begin(), cs.ne_.end()), cs.ne_.end());
    return cs;
}

std::string ConstraintSet::key() const {
    if (unsat_) return "unsat";
    std::string out;
    for (const auto& c : classes_) {
        out += "{";
        for (size_t i = 0; i < c.vars.size(); ++i) {
            if (i) out += ",";
            out += c.vars[i].text();
        }
        if (c.constant) out += "|" + c.constant->literal();
        out += "}";
    }
    out += ";";
    for (size_t i = 0; i < classes_.size(); ++i)
        for (size_t j = 0; j < classes_.size(); ++j) {
            if (rel_[i][j] == REL_NONE) continue;
            out += std::to_string(i) + (rel_[i][j] == REL_LT ? "<" : "<=") + std::to_string(j) + ";";
        }
    for (auto [i, j] : ne_) out += std::to_string(i) + "!=" + std::to_string(j) + ";";
    return out;
}

Term ConstraintSet::repr(size_t cls) const {
    const Class& c = classes_[cls];
    if (c.constant) return Term::constant(*c.constant);
    return Term::attr(c.vars.front().var, c.vars.front().attr);
}

namespace {

Term var_term(const VarKey& k) { return Term::attr(k.var, k.attr); }

} // namespace

Conjunct ConstraintSet::atoms() const {
    if (unsat_) throw EngineError("cannot list atoms of an unsatisfiable constraint set");
    Conjunct out;
    for (const auto& c : classes_) {
        if (c.constant) {
            for (const auto& v : c.vars)
                out.push_back(orient_atom({var_term(v), CmpOp::Eq, Term::constant(*c.constant)}));
        } else {
            for (size_t i = 1; i < c.vars.size(); ++i)
                out.push_back(orient_atom({var_term(c.vars[0]), CmpOp::Eq, var_term(c.vars[i])}));
        }
    }
    size_t k = classes_.size();
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) {
            if (rel_[i][j] == REL_NONE || i == j) continue;
            if (classes_[i].constant && classes_[j].constant) continue;
            bool redundant = false;
            for (size_t m = 0; m < k && !redundant; ++m) {
                if (m == i || m == j) continue;
                if (combine(rel_[i][m], rel_[m][j]) >= rel_[i][j]) redundant = true;
            }
            if (redundant) continue;
            out.push_back(orient_atom(
                {repr(i), rel_[i][j] == REL_LT ? CmpOp::Lt : CmpOp::Le, repr(j)}));
        }
    for (auto [i, j] : ne_) {
        if (classes_[i].constant && classes_[j].constant) continue;
        out.push_back(orient_atom({repr(i), CmpOp::Ne, repr(j)}));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Conjunct ConstraintSet::full_atoms() const {
    if (unsat_) throw EngineError("cannot list atoms of an unsatisfiable constraint set");
    Conjunct out;
    for (const auto& c : classes_) {
        if (c.constant) {
            for (const auto& v : c.vars)
                out.push_back(orient_atom({var_term(v), CmpOp::Eq, Term::constant(*c.constant)}));
        } else {
            for (size_t i = 1; i < c.vars.size(); ++i)
                out.push_back(orient_atom({var_term(c.vars[0]), CmpOp::Eq, var_term(c.vars[i])}));
        }
    }
    size_t k = classes_.size();
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) {
            if (rel_[i][j] == REL_NONE || i == j) continue;
            if (classes_[i].constant && classes_[j].constant) continue;
            out.push_back(orient_atom(
                {repr(i), rel_[i][j] == REL_LT ? CmpOp::Lt : CmpOp::Le, repr(j)}));
        }
    for (auto [i, j] : ne_) {
        if (classes_[i].constant && classes_[j].constant) continue;
        out.push_back(orient_atom({repr(i), CmpOp::Ne, repr(j)}));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Assignment ConstraintSet::witness() const {
    if (unsat_) throw EngineError("cannot build a witness for an unsatisfiable constraint set");
    size_t k = classes_.size();
    std::vector<std::optional<Value>> val(k);
    std::set<Rational> used_num;
    std::set<std::string> used_str;
    for (size_t i = 0; i < k; ++i) {
        if (!classes_[i].constant) continue;
        val[i] = classes_[i].constant;
        if (classes_[i].sort == Sort::Num) used_num.insert(classes_[i].constant->num());
        else used_str.insert(classes_[i].constant->str());
    }
    size_t str_counter = 1;
    for (size_t i = 0; i < k; ++i) {
        if (classes_[i].sort != Sort::Str || val[i]) continue;
        std::string cand;
        do {
            cand = "s" + std::to_string(str_counter++);
        } while (used_str.count(cand));
        used_str.insert(cand);
        val[i] = Value::str(cand);
    }
    // Assign num classes in topological order of the (acyclic) order relation.
    std::vector<bool> pending(k, false);
    size_t npending = 0;
    for (size_t i = 0; i < k; ++i)
        if (classes_[i].sort == Sort::Num && !val[i]) {
            pending[i] = true;
            ++npending;
        }
    while (npending > 0) {
        size_t v = k;
        for (size_t i = 0; i < k && v == k; ++i) {
            if (!pending[i]) continue;
            bool ready = true;
            for (size_t u = 0; u < k; ++u)
                if (pending[u] && u != i && rel_[u][i] != REL_NONE) ready = false;
            if (ready) v = i;
        }
        if (v == k) throw EngineError("internal: order relation is cyclic");
        std::optional<Rational> lo, hi;
        for (size_t u = 0; u < k; ++u) {
            if (u == v || rel_[u][v] == REL_NONE || !val[u]) continue;
            if (classes_[u].sort != Sort::Num) continue;
            const Rational& x = val[u]->num();
            if (!lo || x > *lo) lo = x;
        }
        for (size_t w = 0; w < k; ++w) {
            if (w == v || rel_[v][w] == REL_NONE || !val[w]) continue;
            if (classes_[w].sort != Sort::Num) continue;
            const Rational& x = val[w]->num();
            if (!hi || x < *hi) hi = x;
        }
        Rational cand;
        if (!lo && !hi) cand = 0;
        else if (!lo) cand = *hi - 1;
        else if (!hi) cand = *lo + 1;
        else cand = (*lo + *hi) / 2;
        while (used_num.count(cand)) {
            if (hi) cand = (cand + *hi) / 2;
            else cand = cand + 1;
        }
        used_num.insert(cand);
        val[v] = Value::num(cand);
        pending[v] = false;
        --npending;
    }
    Assignment out;
    for (size_t i = 0; i < k; ++i)
        for (const auto& v : classes_[i].vars) out[v] = *val[i];
    return out;
}

std::vector<VarKey> ConstraintSet::variables() const {
    std::vector<VarKey> out;
    for (const auto& c : classes_)
        for (const auto& v : c.vars) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

ConstraintSet ConstraintSet::drop_solo_class(size_t cls) const {
    // The closure already contains every consequence routed through this
    // class, so deleting its row, column, and disequalities is exact.
    Conjunct out;
    for (size_t c = 0; c < classes_.size(); ++c) {
        if (c == cls) continue;
        const Class& cl = classes_[c];
        if (cl.constant) {
            for (const auto& v : cl.vars)
                out.push_back(orient_atom({var_term(v), CmpOp::Eq, Term::constant(*cl.constant)}));
        } else {
            for (size_t i = 1; i < cl.vars.size(); ++i)
                out.push_back(orient_atom({var_term(cl.vars[0]), CmpOp::Eq, var_term(cl.vars[i])}));
        }
    }
    size_t k = classes_.size();
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) {
            if (i == cls || j == cls || i == j || rel_[i][j] == REL_NONE) continue;
            if (classes_[i].constant && classes_[j].constant) continue;
            out.push_back(orient_atom(
                {repr(i), rel_[i][j] == REL_LT ? CmpOp::Lt : CmpOp::Le, repr(j)}));
        }
    for (auto [i, j] : ne_) {
        if (i == cls || j == cls) continue;
        if (classes_[i].constant && classes_[j].constant) continue;
        out.push_back(orient_atom({repr(i), CmpOp::Ne, repr(j)}));
    }
    return canonicalize(out, schema_);
}

ConstraintSet ConstraintSet::without_var(const VarKey& v, size_t cls) const {
    Conjunct out = full_atoms();
    Conjunct kept;
    for (auto& a : out) {
        bool touches = (a.lhs.is_attr() && VarKey{a.lhs.var, a.lhs.attr_name} == v) ||
                       (a.rhs.is_attr() && VarKey{a.rhs.var, a.rhs.attr_name} == v);
        if (!touches) kept.push_back(std::move(a));
    }
    // Re-anchor the class through a surviving member so no information is
    // lost when v was the representative.
    const Class& c = classes_[cls];
    Term anchor = c.constant ? Term::constant(*c.constant) : Term();
    if (!c.constant) {
        for (const auto& m : c.vars)
            if (!(m == v)) {
                anchor = var_term(m);
                break;
            }
    }
    for (const auto& m : c.vars) {
        if (m == v) continue;
        Term mt = var_term(m);
        if (!(mt == anchor)) kept.push_back(orient_atom({anchor, CmpOp::Eq, mt}));
    }
    if (!c.constant || !c.vars.empty()) {
        size_t k = classes_.size();
        for (size_t j = 0; j < k; ++j) {
            if (j == cls || rel_[cls][j] == REL_NONE) continue;
            kept.push_back(orient_atom(
                {anchor, rel_[cls][j] == REL_LT ? CmpOp::Lt : CmpOp::Le, repr(j)}));
        }
        for (size_t i = 0; i < k; ++i) {
            if (i == cls || rel_[i][cls] == REL_NONE) continue;
            kept.push_back(orient_atom(
                {repr(i), rel_[i][cls] == REL_LT ? CmpOp::Lt : CmpOp::Le, anchor}));
        }
        for (auto [i, j] : ne_) {
            if (i != cls && j != cls) continue;
            size_t other = i == cls ? j : i;
            kept.push_back(orient_atom({anchor, CmpOp::Ne, repr(other)}));
        }
    }
    return canonicalize(kept, schema_);
}

std::vector<ConstraintSet> ConstraintSet::eliminate(const VarKey& v) const {
    if (unsat_) return {*this};
    size_t cls = classes_.size();
    for (size_t i = 0; i < classes_.size(); ++i)
        if (std::find(classes_[i].vars.begin(), classes_[i].vars.end(), v) !=
            classes_[i].vars.end())
            cls = i;
    if (cls == classes_.size()) return {*this};

    const Class& c = classes_[cls];
    if (c.vars.size() > 1 || c.constant) return {without_var(v, cls)};
    if (c.sort == Sort::Str) return {drop_solo_class(cls)};

    std::vector<size_t> partners;
    for (auto [i, j] : ne_) {
        if (i == cls) partners.push_back(j);
        else if (j == cls) partners.push_back(i);
    }
    if (partners.empty()) return {drop_solo_class(cls)};

    // Over a dense order, v != p splits into v < p or v > p; each branch is
    // then a pure bound problem.
    size_t p = partners.front();
    Conjunct base = full_atoms();
    Atom drop = orient_atom({repr(cls), CmpOp::Ne, repr(p)});
    base.erase(std::remove(base.begin(), base.end(), drop), base.end());
    std::vector<ConstraintSet> out;
    std::set<std::string> seen;
    for (CmpOp op : {CmpOp::Lt, CmpOp::Gt}) {
        Conjunct variant = base;
        variant.push_back(orient_atom({repr(cls), op, repr(p)}));
        ConstraintSet branch = canonicalize(variant, schema_);
        if (branch.unsat()) continue;
        for (auto& e : branch.eliminate(v)) {
            if (e.unsat()) continue;
            if (seen.insert(e.key()).second) out.push_back(std::move(e));
        }
    }
    if (out.empty()) {
        ConstraintSet u;
        u.schema_ = schema_;
        u.unsat_ = true;
        out.push_back(std::move(u));
    }
    return out;
}

SatResult satisfiable(const Conjunct& c, const Schema& schema) {
    ConstraintSet cs = canonicalize(c, schema);
    if (cs.unsat()) return {};
    return {true, cs.witness()};
}

SatResult satisfiable(const Dnf& d, const Schema& schema) {
    for (const auto& c : d) {
        auto r = satisfiable(c, schema);
        if (r.sat) return r;
    }
    return {};
}

Dnf prune_unsat(Dnf d, const Schema& schema) {
    Dnf out;
    for (auto& c : d)
        if (satisfiable(c, schema).sat) out.push_back(std::move(c));
    return out;
}

Dnf eliminate_vars(const Dnf& d, std::span<const VarKey> kill, const Schema& schema,
                   const Budget& budget) {
    std::vector<ConstraintSet> sets;
    std::set<std::string> keys;
    for (const auto& conj : d) {
        ConstraintSet cs = canonicalize(conj, schema);
        if (cs.unsat()) continue;
        if (keys.insert(cs.key()).second) sets.push_back(std::move(cs));
    }
    for (const auto& v : kill) {
        std::vector<ConstraintSet> next;
        std::set<std::string> seen;
        for (const auto& cs : sets)
            for (auto& piece : cs.eliminate(v)) {
                if (piece.unsat()) continue;
                if (!seen.insert(piece.key()).second) continue;
                budget.charge(next.size() + 1);
                next.push_back(std::move(piece));
            }
        sets = std::move(next);
    }
    Dnf out;
    for (const auto& cs : sets) out.push_back(cs.atoms());
    return normalize_dnf(std::move(out));
}

Dnf negate_dnf(const Dnf& d, const Schema& schema, const Budget& budget) {
    auto pruner = [&schema](Dnf x) { return prune_unsat(std::move(x), schema); };
    return BoolExpr::negation(BoolExpr::from_dnf(d)).to_dnf(budget, pruner);
}

ImplicationResult implies(const Dnf& a, const Dnf& b, const Schema& schema,
                          const Budget& budget) {
    auto pruner = [&schema](Dnf x) { return prune_unsat(std::move(x), schema); };
    BoolExpr sentence = BoolExpr::conj(
        {BoolExpr::from_dnf(a), BoolExpr::negation(BoolExpr::from_dnf(b))});
    auto r = satisfiable(sentence.to_dnf(budget, pruner), schema);
    if (r.sat) return {false, std::move(r.assignment)};
    return {true, {}};
}

ValidityResult valid(const BoolExpr& sentence, const Schema& schema, const Budget& budget) {
    auto pruner = [&schema](Dnf x) { return prune_unsat(std::move(x), schema); };
    auto r = satisfiable(BoolExpr::negation(sentence).to_dnf(budget, pruner), schema);
    if (r.sat) return {false, std::move(r.assignment)};
    return {true, {}};
}

Conjunct rename_conjunct(Conjunct c, const std::map<std::string, std::string>& renaming) {
    for (auto& a : c) {
        for (Term* t : {&a.lhs, &a.rhs}) {
            if (!t->is_attr()) continue;
            auto it = renaming.find(t->var);
            if (it != renaming.end()) t->var = it->second;
        }
        a = orient_atom(std::move(a));
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

} // namespace prefq::solver

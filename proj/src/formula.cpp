#include "prefq/formula.hpp"
#include "prefq/errors.hpp"
#include "prefq/solver.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace prefq {

const char* op_text(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "<>";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

CmpOp complement_op(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return CmpOp::Ne;
        case CmpOp::Ne: return CmpOp::Eq;
        case CmpOp::Lt: return CmpOp::Ge;
        case CmpOp::Le: return CmpOp::Gt;
        case CmpOp::Gt: return CmpOp::Le;
        case CmpOp::Ge: return CmpOp::Lt;
    }
    return op;
}

CmpOp mirror_op(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return CmpOp::Eq;
        case CmpOp::Ne: return CmpOp::Ne;
        case CmpOp::Lt: return CmpOp::Gt;
        case CmpOp::Le: return CmpOp::Ge;
        case CmpOp::Gt: return CmpOp::Lt;
        case CmpOp::Ge: return CmpOp::Le;
    }
    return op;
}

std::string Term::text() const {
    if (is_attr()) return var + "." + attr_name;
    return value->literal();
}

bool operator==(const Term& a, const Term& b) {
    return a.var == b.var && a.attr_name == b.attr_name && a.value == b.value;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
    // Attribute references order before constants.
    if (a.is_attr() != b.is_attr())
        return a.is_attr() ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.is_attr()) {
        if (auto c = a.var <=> b.var; c != std::strong_ordering::equal) return c;
        return a.attr_name <=> b.attr_name;
    }
    return *a.value <=> *b.value;
}

std::string Atom::text() const {
    return lhs.text() + " " + op_text(op) + " " + rhs.text();
}

Atom orient_atom(Atom a) {
    if (a.rhs < a.lhs) {
        std::swap(a.lhs, a.rhs);
        a.op = mirror_op(a.op);
    }
    return a;
}

Atom complement_atom(const Atom& a) {
    return orient_atom(Atom{a.lhs, complement_op(a.op), a.rhs});
}

void Budget::charge(size_t disjuncts) const {
    if (disjuncts > max_disjuncts)
        throw BudgetError("formula grew to " + std::to_string(disjuncts) +
                          " disjuncts, exceeding the budget of " + std::to_string(max_disjuncts));
}

Dnf dnf_true() { return {Conjunct{}}; }
Dnf dnf_false() { return {}; }

bool is_true_dnf(const Dnf& d) {
    return std::any_of(d.begin(), d.end(), [](const Conjunct& c) { return c.empty(); });
}

bool is_false_dnf(const Dnf& d) { return d.empty(); }

namespace {

// True/false verdict for atoms decidable without a schema context: both
// sides constant, or both sides the same term.
std::optional<bool> ground_verdict(const Atom& a) {
    if (a.lhs == a.rhs) {
        switch (a.op) {
            case CmpOp::Eq:
            case CmpOp::Le:
            case CmpOp::Ge: return true;
            default: return false;
        }
    }
    if (!a.lhs.is_attr() && !a.rhs.is_attr()) {
        const Value& l = *a.lhs.value;
        const Value& r = *a.rhs.value;
        if (l.sort() != r.sort())
            throw SchemaError("comparison between " + l.literal() + " and " + r.literal() +
                              " mixes sorts");
        if (l.sort() == Sort::Str && a.op != CmpOp::Eq && a.op != CmpOp::Ne)
            throw SchemaError("order comparison on str values " + l.literal() + ", " + r.literal());
        int c = compare_values(l, r);
        switch (a.op) {
            case CmpOp::Eq: return c == 0;
            case CmpOp::Ne: return c != 0;
            case CmpOp::Lt: return c < 0;
            case CmpOp::Le: return c <= 0;
            case CmpOp::Gt: return c > 0;
            case CmpOp::Ge: return c >= 0;
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<Conjunct> normalize_conjunct(Conjunct c) {
    Conjunct out;
    for (auto& a : c) {
        Atom o = orient_atom(std::move(a));
        if (auto v = ground_verdict(o)) {
            if (!*v) return std::nullopt;
            continue;
        }
        out.push_back(std::move(o));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Dnf normalize_dnf(Dnf d) {
    Dnf out;
    for (auto& c : d) {
        auto n = normalize_conjunct(std::move(c));
        if (!n) continue;
        if (std::find(out.begin(), out.end(), *n) == out.end()) out.push_back(std::move(*n));
    }
    return out;
}

Dnf dnf_or(Dnf a, const Dnf& b, const Budget& budget) {
    budget.charge(a.size() + b.size());
    for (const auto& c : b)
        if (std::find(a.begin(), a.end(), c) == a.end()) a.push_back(c);
    return a;
}

Dnf dnf_and(const Dnf& a, const Dnf& b, const Budget& budget) {
    budget.charge(a.size() * b.size());
    Dnf out;
    for (const auto& ca : a) {
        for (const auto& cb : b) {
            Conjunct merged = ca;
            merged.insert(merged.end(), cb.begin(), cb.end());
            auto n = normalize_conjunct(std::move(merged));
            if (!n) continue;
            if (std::find(out.begin(), out.end(), *n) == out.end()) out.push_back(std::move(*n));
        }
    }
    return out;
}

Dnf dnf_not(const Dnf& d, const Budget& budget) {
    Dnf acc = dnf_true();
    for (const auto& c : d) {
        Dnf clause;
        for (const auto& a : c) clause.push_back(Conjunct{complement_atom(a)});
        acc = dnf_and(acc, clause, budget);
    }
    return acc;
}

BoolExpr BoolExpr::atom(Atom a) {
    BoolExpr e;
    e.kind_ = Kind::Atom;
    e.atom_ = std::move(a);
    return e;
}

BoolExpr BoolExpr::conj(std::vector<BoolExpr> xs) {
    BoolExpr e;
    e.kind_ = Kind::And;
    e.children_ = std::move(xs);
    return e;
}

BoolExpr BoolExpr::disj(std::vector<BoolExpr> xs) {
    BoolExpr e;
    e.kind_ = Kind::Or;
    e.children_ = std::move(xs);
    return e;
}

BoolExpr BoolExpr::negation(BoolExpr x) {
    BoolExpr e;
    e.kind_ = Kind::Not;
    e.children_.push_back(std::move(x));
    return e;
}

BoolExpr BoolExpr::constant(bool b) {
    BoolExpr e;
    e.kind_ = b ? Kind::True : Kind::False;
    return e;
}

BoolExpr BoolExpr::from_dnf(const Dnf& d) {
    std::vector<BoolExpr> disjuncts;
    for (const auto& c : d) {
        std::vector<BoolExpr> atoms;
        for (const auto& a : c) atoms.push_back(BoolExpr::atom(a));
        disjuncts.push_back(BoolExpr::conj(std::move(atoms)));
    }
    if (disjuncts.empty()) return BoolExpr::constant(false);
    return BoolExpr::disj(std::move(disjuncts));
}

Dnf BoolExpr::to_dnf(const Budget& budget, const DnfPruner& prune) const {
    return to_dnf_impl(false, budget, prune);
}

Dnf BoolExpr::to_dnf_impl(bool negated, const Budget& budget, const DnfPruner& prune) const {
    switch (kind_) {
        case Kind::True: return negated ? dnf_false() : dnf_true();
        case Kind::False: return negated ? dnf_true() : dnf_false();
        case Kind::Atom: {
            Atom a = negated ? complement_atom(*atom_) : orient_atom(*atom_);
            if (auto v = ground_verdict(a)) return *v ? dnf_true() : dnf_false();
            return {Conjunct{a}};
        }
        case Kind::Not: return children_[0].to_dnf_impl(!negated, budget, prune);
        case Kind::And:
        case Kind::Or: {
            bool conjunctive = (kind_ == Kind::And) != negated;
            Dnf acc = conjunctive ? dnf_true() : dnf_false();
            for (const auto& ch : children_) {
                Dnf d = ch.to_dnf_impl(negated, budget, prune);
                if (conjunctive) {
                    acc = dnf_and(acc, d, budget);
                    if (prune) acc = prune(std::move(acc));
                } else {
                    acc = dnf_or(std::move(acc), d, budget);
                }
            }
            return acc;
        }
    }
    return dnf_false();
}

std::string BoolExpr::text() const {
    switch (kind_) {
        case Kind::True: return "true";
        case Kind::False: return "false";
        case Kind::Atom: return atom_->text();
        case Kind::Not: return "not (" + children_[0].text() + ")";
        case Kind::And:
        case Kind::Or: {
            if (children_.empty()) return kind_ == Kind::And ? "true" : "false";
            std::string sep = kind_ == Kind::And ? " and " : " or ";
            std::string out;
            for (size_t i = 0; i < children_.size(); ++i) {
                if (i) out += sep;
                out += "(" + children_[i].text() + ")";
            }
            return out;
        }
    }
    return "";
}

namespace {

Sort term_sort(const Term& t, const Schema& schema, const std::vector<std::string>& vars) {
    if (!t.is_attr()) return t.value->sort();
    bool known = std::find(vars.begin(), vars.end(), t.var) != vars.end();
    if (!known)
        throw SchemaError("unknown tuple variable '" + t.var + "' in term " + t.text());
    return schema.attrs()[schema.require(t.attr_name)].sort;
}

void validate_atom(const Atom& a, const Schema& schema, const std::vector<std::string>& vars) {
    Sort ls = term_sort(a.lhs, schema, vars);
    Sort rs = term_sort(a.rhs, schema, vars);
    if (ls != rs)
        throw SchemaError("atom '" + a.text() + "' compares " + sort_name(ls) + " with " +
                          sort_name(rs));
    bool order_op = a.op != CmpOp::Eq && a.op != CmpOp::Ne;
    if (order_op && ls != Sort::Num)
        throw SchemaError("atom '" + a.text() + "' applies an order comparison to str terms");
}

} // namespace

Formula::Formula(Schema schema, std::vector<std::string> vars, Dnf dnf)
    : schema_(std::move(schema)), vars_(std::move(vars)), dnf_(normalize_dnf(std::move(dnf))) {
    if (vars_.empty() || vars_.size() > 4)
        throw SchemaError("formula must use between 1 and 4 tuple variables");
    for (size_t i = 0; i < vars_.size(); ++i)
        for (size_t j = i + 1; j < vars_.size(); ++j)
            if (vars_[i] == vars_[j])
                throw SchemaError("duplicate tuple variable '" + vars_[i] + "'");
    for (const auto& c : dnf_)
        for (const auto& a : c) validate_atom(a, schema_, vars_);
}

std::string dnf_text(const Dnf& d) {
    if (is_false_dnf(d)) return "false";
    if (is_true_dnf(d)) return "true";
    std::string out;
    for (size_t i = 0; i < d.size(); ++i) {
        if (i) out += " or ";
        for (size_t j = 0; j < d[i].size(); ++j) {
            if (j) out += " and ";
            out += d[i][j].text();
        }
    }
    return out;
}

Dnf rename_attributes(Dnf d, const std::map<std::string, std::string>& renaming) {
    for (auto& conj : d)
        for (auto& atom : conj) {
            for (Term* t : {&atom.lhs, &atom.rhs}) {
                if (!t->is_attr()) continue;
                auto it = renaming.find(t->attr_name);
                if (it != renaming.end()) t->attr_name = it->second;
            }
            atom = orient_atom(std::move(atom));
        }
    return normalize_dnf(std::move(d));
}

std::string Formula::text() const { return dnf_text(dnf_); }

Dnf Formula::instantiate(std::span<const std::string> new_vars) const {
    if (new_vars.size() != vars_.size())
        throw SchemaError("instantiate expects " + std::to_string(vars_.size()) + " variable names");
    Dnf out = dnf_;
    for (auto& c : out) {
        for (auto& a : c) {
            for (Term* t : {&a.lhs, &a.rhs}) {
                if (!t->is_attr()) continue;
                for (size_t i = 0; i < vars_.size(); ++i)
                    if (t->var == vars_[i]) {
                        t->var = new_vars[i];
                        break;
                    }
            }
            a = orient_atom(std::move(a));
        }
    }
    return normalize_dnf(std::move(out));
}

Evaluator::Evaluator(const Formula& f) : nvars_(f.vars().size()) {
    const auto& vars = f.vars();
    auto compile_side = [&](const Term& t) {
        Side s;
        if (t.is_attr()) {
            auto it = std::find(vars.begin(), vars.end(), t.var);
            s.var = static_cast<int>(it - vars.begin());
            s.attr = f.schema().require(t.attr_name);
        } else {
            s.value = *t.value;
        }
        return s;
    };
    for (const auto& c : f.dnf()) {
        std::vector<CAtom> cc;
        cc.reserve(c.size());
        for (const auto& a : c) cc.push_back(CAtom{compile_side(a.lhs), a.op, compile_side(a.rhs)});
        dnf_.push_back(std::move(cc));
    }
}

bool Evaluator::eval(std::span<const Tuple* const> tuples) const {
    auto side_value = [&](const Side& s) -> const Value& {
        return s.var < 0 ? s.value : tuples[static_cast<size_t>(s.var)]->at(s.attr);
    };
    for (const auto& c : dnf_) {
        bool ok = true;
        for (const auto& a : c) {
            int cmp = compare_values(side_value(a.lhs), side_value(a.rhs));
            bool v = false;
            switch (a.op) {
                case CmpOp::Eq: v = cmp == 0; break;
                case CmpOp::Ne: v = cmp != 0; break;
                case CmpOp::Lt: v = cmp < 0; break;
                case CmpOp::Le: v = cmp <= 0; break;
                case CmpOp::Gt: v = cmp > 0; break;
                case CmpOp::Ge: v = cmp >= 0; break;
            }
            if (!v) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

bool Evaluator::eval2(const Tuple& t1, const Tuple& t2) const {
    const Tuple* ts[2] = {&t1, &t2};
    return eval(std::span<const Tuple* const>(ts, 2));
}

bool Evaluator::eval1(const Tuple& t) const {
    const Tuple* ts[1] = {&t};
    return eval(std::span<const Tuple* const>(ts, 1));
}

bool dominates(const Formula& f, const Tuple& t1, const Tuple& t2) {
    if (!f.is_pref()) throw SchemaError("dominance requires a two-variable preference formula");
    return Evaluator(f).eval2(t1, t2);
}

bool holds(const Formula& f, const Tuple& t) {
    if (!f.is_selection()) throw SchemaError("holds requires a one-variable condition");
    return Evaluator(f).eval1(t);
}

Formula negate(const Formula& f, const Budget& budget) {
    return Formula(f.schema(), f.vars(), solver::negate_dnf(f.dnf(), f.schema(), budget));
}

Formula swap_vars(const Formula& f) {
    if (!f.is_pref()) throw SchemaError("swap requires a two-variable preference formula");
    std::vector<std::string> swapped{f.vars()[1], f.vars()[0]};
    return Formula(f.schema(), f.vars(), f.instantiate(swapped));
}

Conjunct tuple_eq_conjunct(const Schema& schema, const std::string& var_a,
                           const std::string& var_b, std::span<const std::string> attrs) {
    Conjunct c;
    auto add = [&](const std::string& name) {
        c.push_back(orient_atom(Atom{Term::attr(var_a, name), CmpOp::Eq, Term::attr(var_b, name)}));
    };
    if (attrs.empty())
        for (const auto& def : schema.attrs()) add(def.name);
    else
        for (const auto& name : attrs) add(name);
    std::sort(c.begin(), c.end());
    return c;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
    enum class Kind { Ident, Number, String, Op, LParen, RParen, End } kind;
    std::string text;
    size_t pos;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
        size_t start = i_;
        if (i_ >= src_.size()) {
            tok_ = {Token::Kind::End, "", start};
            return;
        }
        char c = src_[i_];
        if (c == '(') {
            ++i_;
            tok_ = {Token::Kind::LParen, "(", start};
            return;
        }
        if (c == ')') {
            ++i_;
            tok_ = {Token::Kind::RParen, ")", start};
            return;
        }
        if (c == '\'') {
            ++i_;
            std::string s;
            while (i_ < src_.size() && src_[i_] != '\'') {
                if (src_[i_] == '\n') throw ParseError("unterminated string literal");
                s += src_[i_++];
            }
            if (i_ >= src_.size()) throw ParseError("unterminated string literal");
            ++i_;
            tok_ = {Token::Kind::String, s, start};
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            ((c == '-' || c == '+') && i_ + 1 < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[i_ + 1])) || src_[i_ + 1] == '.'))) {
            std::string s(1, c);
            ++i_;
            while (i_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[i_])) || src_[i_] == '.'))
                s += src_[i_++];
            tok_ = {Token::Kind::Number, s, start};
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string s;
            while (i_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_' ||
                    src_[i_] == '.')) {
                s += src_[i_++];
            }
            tok_ = {Token::Kind::Ident, s, start};
            return;
        }
        if (c == '=' || c == '<' || c == '>' || c == '!') {
            std::string s(1, c);
            ++i_;
            if (i_ < src_.size() && (src_[i_] == '=' || src_[i_] == '>')) s += src_[i_++];
            tok_ = {Token::Kind::Op, s, start};
            return;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "' at position " +
                         std::to_string(start));
    }

    std::string_view src_;
    size_t i_ = 0;
    Token tok_{Token::Kind::End, "", 0};
};

class FormulaParser {
public:
    FormulaParser(std::string_view src) : lex_(src) {}

    BoolExpr parse() {
        BoolExpr e = parse_or();
        if (lex_.peek().kind != Token::Kind::End)
            throw ParseError("unexpected trailing input '" + lex_.peek().text + "' in formula");
        return e;
    }

    const std::set<std::string>& used_vars() const { return used_; }

private:
    BoolExpr parse_or() {
        std::vector<BoolExpr> xs{parse_and()};
        while (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "or") {
            lex_.take();
            xs.push_back(parse_and());
        }
        return xs.size() == 1 ? std::move(xs[0]) : BoolExpr::disj(std::move(xs));
    }

    BoolExpr parse_and() {
        std::vector<BoolExpr> xs{parse_unary()};
        while (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "and") {
            lex_.take();
            xs.push_back(parse_unary());
        }
        return xs.size() == 1 ? std::move(xs[0]) : BoolExpr::conj(std::move(xs));
    }

    BoolExpr parse_unary() {
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::Ident && t.text == "not") {
            lex_.take();
            return BoolExpr::negation(parse_unary());
        }
        if (t.kind == Token::Kind::LParen) {
            lex_.take();
            BoolExpr e = parse_or();
            if (lex_.peek().kind != Token::Kind::RParen)
                throw ParseError("expected ')' in formula");
            lex_.take();
            return e;
        }
        if (t.kind == Token::Kind::Ident && t.text == "true") {
            lex_.take();
            return BoolExpr::constant(true);
        }
        if (t.kind == Token::Kind::Ident && t.text == "false") {
            lex_.take();
            return BoolExpr::constant(false);
        }
        return parse_atom();
    }

    BoolExpr parse_atom() {
        Term lhs = parse_term();
        Token op = lex_.take();
        if (op.kind != Token::Kind::Op)
            throw ParseError("expected comparison operator after '" + lhs.text() + "'");
        CmpOp o;
        if (op.text == "=") o = CmpOp::Eq;
        else if (op.text == "<>" || op.text == "!=") o = CmpOp::Ne;
        else if (op.text == "<") o = CmpOp::Lt;
        else if (op.text == "<=") o = CmpOp::Le;
        else if (op.text == ">") o = CmpOp::Gt;
        else if (op.text == ">=") o = CmpOp::Ge;
        else throw ParseError("unknown comparison operator '" + op.text + "'");
        Term rhs = parse_term();
        return BoolExpr::atom(Atom{std::move(lhs), o, std::move(rhs)});
    }

    Term parse_term() {
        Token t = lex_.take();
        if (t.kind == Token::Kind::Number) return Term::constant(Value::num(parse_decimal(t.text)));
        if (t.kind == Token::Kind::String) return Term::constant(Value::str(t.text));
        if (t.kind == Token::Kind::Ident) {
            auto dot = t.text.find('.');
            if (dot == std::string::npos || dot == 0 || dot + 1 >= t.text.size() ||
                t.text.find('.', dot + 1) != std::string::npos)
                throw ParseError("expected tuplevar.Attribute, number, or 'string', got '" +
                                 t.text + "'");
            std::string var = t.text.substr(0, dot);
            used_.insert(var);
            return Term::attr(var, t.text.substr(dot + 1));
        }
        throw ParseError("expected a term, got '" + t.text + "'");
    }

    Lexer lex_;
    std::set<std::string> used_;
};

} // namespace

Formula parse_pref_formula(std::string_view text, const Schema& schema, const std::string& var1,
                           const std::string& var2, const Budget& budget) {
    FormulaParser p(text);
    BoolExpr e = p.parse();
    for (const auto& v : p.used_vars())
        if (v != var1 && v != var2)
            throw ParseError("formula uses undeclared tuple variable '" + v + "'");
    return Formula(schema, {var1, var2}, e.to_dnf(budget));
}

Formula parse_selection(std::string_view text, const Schema& schema, const Budget& budget) {
    FormulaParser p(text);
    BoolExpr e = p.parse();
    if (p.used_vars().size() > 1)
        throw ParseError("selection condition must use a single tuple variable");
    std::string var = p.used_vars().empty() ? "t" : *p.used_vars().begin();
    return Formula(schema, {var}, e.to_dnf(budget));
}

} // namespace prefq

#include "prefq/plan.hpp"

#include "prefq/errors.hpp"

#include <map>
#include <set>
#include <utility>

namespace prefq {

namespace {

std::string join(const std::vector<std::string>& xs, const char* sep) {
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += sep;
        out += xs[i];
    }
    return out;
}

} // namespace

ArithExpr ArithExpr::constant(Rational v) {
    ArithExpr e;
    e.op_ = 'c';
    e.value_ = std::move(v);
    return e;
}

ArithExpr ArithExpr::attribute(std::string name) {
    ArithExpr e;
    e.op_ = 'a';
    e.attr_ = std::move(name);
    return e;
}

ArithExpr ArithExpr::binary(char op, ArithExpr lhs, ArithExpr rhs) {
    if (op != '+' && op != '-' && op != '*')
        throw EngineError(std::string("unsupported arithmetic operator '") + op + "'");
    ArithExpr e;
    e.op_ = op;
    e.args_.push_back(std::move(lhs));
    e.args_.push_back(std::move(rhs));
    return e;
}

void ArithExpr::validate(const Schema& schema) const {
    switch (op_) {
    case 'c':
        return;
    case 'a':
        if (schema.sort_of(attr_) != Sort::Num)
            throw SchemaError("arithmetic over non-num attribute '" + attr_ + "'");
        return;
    default:
        for (const auto& a : args_) a.validate(schema);
    }
}

Rational ArithExpr::eval(const Schema& schema, const Tuple& t) const {
    switch (op_) {
    case 'c':
        return value_;
    case 'a':
        return t.at(schema.require(attr_)).num();
    case '+':
        return args_[0].eval(schema, t) + args_[1].eval(schema, t);
    case '-':
        return args_[0].eval(schema, t) - args_[1].eval(schema, t);
    default:
        return args_[0].eval(schema, t) * args_[1].eval(schema, t);
    }
}

std::string ArithExpr::text() const {
    switch (op_) {
    case 'c':
        return decimal_string(value_);
    case 'a':
        return attr_;
    default: {
        auto side = [](const ArithExpr& e) {
            return e.op_ == 'c' || e.op_ == 'a' ? e.text() : "(" + e.text() + ")";
        };
        return side(args_[0]) + " " + op_ + " " + side(args_[1]);
    }
    }
}

const char* plan_op_name(PlanOp op) {
    switch (op) {
    case PlanOp::Scan:
        return "scan";
    case PlanOp::Select:
        return "select";
    case PlanOp::Project:
        return "project";
    case PlanOp::Product:
        return "product";
    case PlanOp::Union:
        return "union";
    case PlanOp::Diff:
        return "diff";
    case PlanOp::Extend:
        return "extend";
    case PlanOp::GroupCount:
        return "groupcount";
    case PlanOp::Winnow:
        return "winnow";
    case PlanOp::WinnowIter:
        return "iter";
    case PlanOp::Rank:
        return "rank";
    default:
        return "wwinnow";
    }
}

namespace {

void check_pref(const Formula& pref, const PlanPtr& input, const char* what) {
    if (!pref.is_pref())
        throw SchemaError(std::string(what) + " needs a two-variable preference formula");
    if (pref.schema() != input->schema())
        throw SchemaError(std::string(what) + " formula is over " + pref.schema().text() +
                          " but the input has schema " + input->schema().text());
}

} // namespace

PlanPtr Plan::scan(std::string name, Schema schema) {
    if (name.empty()) throw SchemaError("relation name must not be empty");
    Plan p;
    p.op_ = PlanOp::Scan;
    p.schema_ = std::move(schema);
    p.name_ = std::move(name);
    return std::make_shared<const Plan>(std::move(p));
}

PlanPtr Plan::select(Formula condition, PlanPtr input) {
    if (!condition.is_selection())
        throw SchemaError("selection condition must use exactly one tuple variable");
    if (condition.schema() != input->schema())
        throw SchemaError("selection condition is over " + condition.schema().text() +
                          " but the input has schema " + input->schema().text());
    Plan p;
    p.op_ = PlanOp::Select;
    p.schema_ = input->schema();
    p.condition_ = std::move(condition);
    p.children_ = {std::move(input)};
    return std::make_shared<const Plan>(std::move(p));
}

PlanPtr Plan::project(std::vector<std::string> attrs, PlanPtr input) {
    if (attrs.empty()) throw SchemaError("projection needs at least one attribute");
    Plan p;
    p.op_ = PlanOp::Project;
    p.schema_ = project_schema(input->schema(), attrs);
    p.attrs_ = std::move(attrs);
    p.children_ = {std::move(input)};
    return std::make_shared<const Plan>(std::move(p));
}

PlanPtr Plan::product(PlanPtr left, PlanPtr right) {
    Plan p;
    p.op_ = PlanOp::Product;
    p.schema_ = product_schema(left->schema(), right->schema());
    p.children_ = {std::move(left), std::move(right)};
    return std::make_shared<const Plan>(std::move(p));
}

namespace {

void check_compatible(const PlanPtr& left, const PlanPtr& right, const char* what) {
    if (!left->schema().compatible(right->schema()))
        throw SchemaError(std::string(what) + " operands have incompatible schemas " +
                          left->schema().text() + " and " + right->schema().text());
}

} // namespace

PlanPtr Plan::set_union(PlanPtr left, PlanPtr right) {
    check_compatible(left, right, "union");
    Plan p;
    p.op_ = PlanOp::Union;
    p.schema_ = left->schema();
    p.children_ = {std::move(left), std::move(right)};
    return std::make_shared<const Plan>(std::move(p));
}

PlanPtr Plan::set_difference(PlanPtr left, PlanPtr right) {
    check_compatible(left, right, "difference");
    Plan p;
    p.op_ = PlanOp::Diff;
    p.schema_ = left->schema();
    p.children_ = {std::move(left), std::move(right)};
    return std::make_shared<const Plan>(std::move(p));
}

PlanPtr Plan::extend(std::string attr, ArithExpr expr, PlanPtr input) {
    if (attr.empty()) throw SchemaError("extend column name must not be empty");
    if (input->schema().has(attr))
        throw SchemaError("extend column '" + attr + "' already exists in " +
                          input->schema().text());
    expr.validate(input->schema());
    std::vector<AttributeDef> attrs = input->schema().attrs();
    attrs.push_back({attr, Sort::Num});
    Plan p;
    p.op_ = PlanOp::Extend;
    p.schema_ = Schema(std::move(attrs));
    p.name_ = std::move(attr);
    p.expr_ = std::move(expr);
    p.children_ = {std::move(input)};
    return std::make_shared<const Plan>(std::move(p));
}

PlanPtr Plan::group_count(std::vector<std::string> group_attrs, std::string distinct_attr,
                          std::string out_attr, PlanPtr input) {
    if (out_attr.empty()) throw SchemaError("group count output column must be named");
    input->schema().require(distinct_attr);
    std::vector<AttributeDef> attrs;
    for (const auto& g : group_attrs) attrs.push_back(input->schema().attrs()[input->schema().require(g)]);
    attrs.push_back({out_attr, Sort::Num});
    Plan p;
    p.op_ = PlanOp::GroupCount;
    p.schema_ = Schema(std::move(attrs));
    p.attrs_ = std::move(group_attrs);
    p.name_ = std::move(distinct_attr);
    p.out_attr_ = std::move(out_attr);
    p.children_ = {std::move(input)};
    return std::make_shared<const Plan>(std::move(p));
}

PlanPtr Plan::winnow(Formula pref, PlanPtr input, WinnowOptions opts, std::string label) {
    check_pref(pref, input, "winnow");
    Plan p;
    p.op_ = PlanOp::Winnow;
    p.schema_ = input->schema();
    p.pref_ = std::move(pref);
    p.opts_ = opts;
    p.label_ = std::move(label);
    p.children_ = {std::move(input)};
    return std::make_shared<const Plan>(std::move(p));
}

PlanPtr Plan::winnow_iter(Formula pref, size_t n, PlanPtr input, WinnowOptions opts,
                          std::string label) {
    check_pref(pref, input, "iterated winnow");
    if (n < 1) throw EngineError("iterated winnow needs an iteration count of at least 1");
    Plan p;
    p.op_ = PlanOp::WinnowIter;
    p.schema_ = input->schema();
    p.pref_ = std::move(pref);
    p.opts_ = opts;
    p.iterations_ = n;
    p.label_ = std::move(label);
    p.children_ = {std::move(input)};
    return std::make_shared<const Plan>(std::move(p));
}

PlanPtr Plan::rank(Formula pref, PlanPtr input, WinnowOptions opts, std::string label) {
    check_pref(pref, input, "rank");
    Plan p;
    p.op_ = PlanOp::Rank;
    p.schema_ = ranked_schema(input->schema());
    p.pref_ = std::move(pref);
    p.opts_ = opts;
    p.label_ = std::move(label);
    p.children_ = {std::move(input)};
    return std::make_shared<const Plan>(std::move(p));
}

PlanPtr Plan::weak_winnow(Formula pref, PlanPtr input, WinnowOptions opts, std::string label) {
    check_pref(pref, input, "weak winnow");
    Plan p;
    p.op_ = PlanOp::WeakWinnow;
    p.schema_ = input->schema();
    p.pref_ = std::move(pref);
    p.opts_ = opts;
    p.label_ = std::move(label);
    p.children_ = {std::move(input)};
    return std::make_shared<const Plan>(std::move(p));
}

PlanPtr Plan::with_children(std::vector<PlanPtr> kids) const {
    if (kids.size() != children_.size())
        throw EngineError(std::string(plan_op_name(op_)) + " node expects " +
                          std::to_string(children_.size()) + " inputs");
    switch (op_) {
    case PlanOp::Scan:
        return scan(name_, schema_);
    case PlanOp::Select:
        return select(*condition_, std::move(kids[0]));
    case PlanOp::Project:
        return project(attrs_, std::move(kids[0]));
    case PlanOp::Product:
        return product(std::move(kids[0]), std::move(kids[1]));
    case PlanOp::Union:
        return set_union(std::move(kids[0]), std::move(kids[1]));
    case PlanOp::Diff:
        return set_difference(std::move(kids[0]), std::move(kids[1]));
    case PlanOp::Extend:
        return extend(name_, *expr_, std::move(kids[0]));
    case PlanOp::GroupCount:
        return group_count(attrs_, name_, out_attr_, std::move(kids[0]));
    case PlanOp::Winnow:
        return winnow(*pref_, std::move(kids[0]), opts_, label_);
    case PlanOp::WinnowIter:
        return winnow_iter(*pref_, iterations_, std::move(kids[0]), opts_, label_);
    case PlanOp::Rank:
        return rank(*pref_, std::move(kids[0]), opts_, label_);
    default:
        return weak_winnow(*pref_, std::move(kids[0]), opts_, label_);
    }
}

size_t Plan::node_count() const {
    size_t n = 1;
    for (const auto& c : children_) n += c->node_count();
    return n;
}

namespace {

std::string node_header(const Plan& p) {
    auto pref_text = [&p] { return p.label().empty() ? p.pref().text() : p.label(); };
    switch (p.op()) {
    case PlanOp::Scan:
        return p.scan_name();
    case PlanOp::Select:
        return "select[" + p.condition().text() + "]";
    case PlanOp::Project:
        return "project[" + join(p.attrs(), ", ") + "]";
    case PlanOp::Product:
    case PlanOp::Union:
    case PlanOp::Diff:
        return plan_op_name(p.op());
    case PlanOp::Extend:
        return "extend[" + p.new_attr() + " := " + p.expr().text() + "]";
    case PlanOp::GroupCount:
        return "groupcount[" + join(p.attrs(), ", ") + "; distinct " + p.distinct_attr() +
               " -> " + p.out_attr() + "]";
    case PlanOp::Winnow:
        return "winnow[" + pref_text() + "]";
    case PlanOp::WinnowIter:
        return "iter[" + pref_text() + ", " + std::to_string(p.iterations()) + "]";
    case PlanOp::Rank:
        return "rank[" + pref_text() + "]";
    default:
        return "wwinnow[" + pref_text() + "]";
    }
}

} // namespace

std::string Plan::text() const {
    std::string out = node_header(*this);
    if (children_.empty()) return out;
    out += "(";
    for (size_t i = 0; i < children_.size(); ++i) {
        if (i) out += ", ";
        out += children_[i]->text();
    }
    out += ")";
    return out;
}

namespace {

void render_tree(const Plan& p, size_t depth, std::string& out) {
    out.append(2 * depth, ' ');
    out += node_header(p);
    out += "  : ";
    out += p.schema().text();
    out += "\n";
    for (const auto& c : p.children()) render_tree(*c, depth + 1, out);
}

} // namespace

std::string Plan::tree_text() const {
    std::string out;
    render_tree(*this, 0, out);
    return out;
}

PlanPtr apply_options(const PlanPtr& plan, const WinnowOptions& opts) {
    std::vector<PlanPtr> kids;
    for (const auto& c : plan->children()) kids.push_back(apply_options(c, opts));
    switch (plan->op()) {
    case PlanOp::Winnow:
        return Plan::winnow(plan->pref(), std::move(kids[0]), opts, plan->label());
    case PlanOp::WinnowIter:
        return Plan::winnow_iter(plan->pref(), plan->iterations(), std::move(kids[0]), opts,
                                 plan->label());
    case PlanOp::Rank:
        return Plan::rank(plan->pref(), std::move(kids[0]), opts, plan->label());
    case PlanOp::WeakWinnow:
        return Plan::weak_winnow(plan->pref(), std::move(kids[0]), opts, plan->label());
    default:
        return plan->children().empty() ? plan : plan->with_children(std::move(kids));
    }
}

Relation evaluate(const PlanPtr& plan, const Catalog& catalog) {
    const Plan& p = *plan;
    switch (p.op()) {
    case PlanOp::Scan: {
        auto it = catalog.find(p.scan_name());
        if (it == catalog.end()) throw EngineError("unknown relation '" + p.scan_name() + "'");
        if (it->second.schema() != p.schema())
            throw SchemaError("relation '" + p.scan_name() + "' has schema " +
                              it->second.schema().text() + " but the plan expects " +
                              p.schema().text());
        return it->second;
    }
    case PlanOp::Select: {
        Relation in = evaluate(p.child(), catalog);
        Evaluator ev(p.condition());
        Relation out(p.schema());
        for (const Tuple& t : in.tuples())
            if (ev.eval1(t)) out.insert(t);
        return out;
    }
    case PlanOp::Project: {
        Relation in = evaluate(p.child(), catalog);
        Relation out(p.schema());
        for (const Tuple& t : in.tuples())
            out.insert(project_tuple(in.schema(), t, p.attrs()));
        return out;
    }
    case PlanOp::Product: {
        Relation left = evaluate(p.child(0), catalog);
        Relation right = evaluate(p.child(1), catalog);
        Relation out(p.schema());
        for (const Tuple& l : left.tuples())
            for (const Tuple& r : right.tuples()) {
                std::vector<Value> vals = l.values();
                vals.insert(vals.end(), r.values().begin(), r.values().end());
                out.insert(Tuple(std::move(vals)));
            }
        return out;
    }
    case PlanOp::Union: {
        Relation out = evaluate(p.child(0), catalog);
        Relation right = evaluate(p.child(1), catalog);
        for (const Tuple& t : right.tuples()) out.insert(t);
        return out;
    }
    case PlanOp::Diff: {
        Relation left = evaluate(p.child(0), catalog);
        Relation right = evaluate(p.child(1), catalog);
        Relation out(p.schema());
        for (const Tuple& t : left.tuples())
            if (!right.contains(t)) out.insert(t);
        return out;
    }
    case PlanOp::Extend: {
        Relation in = evaluate(p.child(), catalog);
        Relation out(p.schema());
        for (const Tuple& t : in.tuples()) {
            std::vector<Value> vals = t.values();
            vals.push_back(Value::num(p.expr().eval(in.schema(), t)));
            out.insert(Tuple(std::move(vals)));
        }
        return out;
    }
    case PlanOp::GroupCount: {
        Relation in = evaluate(p.child(), catalog);
        size_t distinct_at = in.schema().require(p.distinct_attr());
        std::map<Tuple, std::set<Value>> groups;
        for (const Tuple& t : in.tuples())
            groups[project_tuple(in.schema(), t, p.attrs())].insert(t.at(distinct_at));
        Relation out(p.schema());
        for (const auto& [key, seen] : groups) {
            std::vector<Value> vals = key.values();
            vals.push_back(Value::num(Rational(static_cast<unsigned long>(seen.size()))));
            out.insert(Tuple(std::move(vals)));
        }
        return out;
    }
    case PlanOp::Winnow:
        return winnow(p.pref(), evaluate(p.child(), catalog), p.options());
    case PlanOp::WinnowIter:
        return winnow_iter(p.pref(), evaluate(p.child(), catalog), p.iterations(), p.options());
    case PlanOp::Rank:
        return rank(p.pref(), evaluate(p.child(), catalog), p.options()).ranked;
    default:
        return weak_winnow(p.pref(), evaluate(p.child(), catalog), p.options());
    }
}

} // namespace prefq

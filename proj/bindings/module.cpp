#include "prefq/compose.hpp"
#include "prefq/csv.hpp"
#include "prefq/errors.hpp"
#include "prefq/eval.hpp"
#include "prefq/props.hpp"
#include "prefq/render.hpp"
#include "prefq/rewrite.hpp"
#include "prefq/script.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace prefq;

namespace {

py::object value_to_py(const Value& v) {
    if (v.sort() == Sort::Str) return py::str(v.str());
    const Rational& q = v.num();
    if (boost::multiprecision::denominator(q) == 1)
        return py::module_::import("builtins").attr("int")(
            boost::multiprecision::numerator(q).str());
    return py::module_::import("fractions").attr("Fraction")(q.str());
}

Rational py_to_rational(py::handle obj) {
    if (py::isinstance<py::int_>(obj))
        return Rational(py::cast<std::string>(py::str(obj)));
    if (py::isinstance<py::float_>(obj))
        return parse_decimal(py::cast<std::string>(py::repr(obj)));
    if (py::isinstance<py::str>(obj)) {
        std::string text = py::cast<std::string>(obj);
        size_t slash = text.find('/');
        if (slash == std::string::npos) return parse_decimal(text);
        return Rational(text);
    }
    if (py::hasattr(obj, "numerator") && py::hasattr(obj, "denominator"))
        return Rational(py::cast<std::string>(py::str(obj.attr("numerator"))) + "/" +
                        py::cast<std::string>(py::str(obj.attr("denominator"))));
    throw ParseError("cannot interpret " + py::cast<std::string>(py::repr(obj)) +
                     " as a number");
}

Value py_to_value(py::handle obj, Sort sort) {
    if (sort == Sort::Str) return Value::str(py::cast<std::string>(obj));
    return Value::num(py_to_rational(obj));
}

Relation make_relation(const Schema& schema, const py::iterable& rows) {
    Relation r(schema);
    for (py::handle row : rows) {
        auto cells = py::cast<py::sequence>(row);
        if (py::len(cells) != schema.arity())
            throw SchemaError("row has " + std::to_string(py::len(cells)) +
                              " cells but the schema expects " +
                              std::to_string(schema.arity()));
        std::vector<Value> values;
        for (size_t i = 0; i < schema.arity(); ++i)
            values.push_back(py_to_value(cells[i], schema.at(i).sort));
        r.insert(Tuple(std::move(values)));
    }
    return r;
}

py::list relation_rows(const Relation& r) {
    py::list out;
    for (const Tuple& t : r.tuples()) {
        py::tuple row(t.arity());
        for (size_t i = 0; i < t.arity(); ++i) row[i] = value_to_py(t.at(i));
        out.append(row);
    }
    return out;
}

WinnowOptions make_options(const std::string& algo, size_t window, bool force) {
    WinnowOptions o;
    o.algo = parse_algo(algo);
    o.window = window;
    o.force = force;
    return o;
}

py::dict check_to_dict(const PropertyCheck& check) {
    py::dict out;
    out["holds"] = check.holds;
    py::list witness;
    for (const Tuple& t : check.witness) {
        py::tuple row(t.arity());
        for (size_t i = 0; i < t.arity(); ++i) row[i] = value_to_py(t.at(i));
        witness.append(row);
    }
    out["witness"] = witness;
    return out;
}

// Plans are immutable and shared; a small wrapper keeps the const pointer
// out of pybind's holder machinery.
struct PyPlan {
    PlanPtr plan;
};

struct PyScript {
    Script script;
};

py::dict trace_to_dict(const TraceEntry& e) {
    py::dict out;
    out["rule"] = std::string(rule_name(e.rule));
    out["location"] = e.location;
    out["precondition"] = e.precondition;
    out["verdict"] = e.verdict;
    out["applied"] = e.applied;
    out["detail"] = e.detail;
    return out;
}

} // namespace

PYBIND11_MODULE(_prefq, m) {
    m.doc() = "Preference queries over in-memory relations";

    py::register_exception<ParseError>(m, "ParseError");
    py::register_exception<SchemaError>(m, "SchemaError");
    py::register_exception<BudgetError>(m, "BudgetError");
    py::register_exception<EngineError>(m, "EngineError");
    static py::exception<GateError> gate_error(m, "GateError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const GateError& e) {
            gate_error((std::string(e.what()) + " [property: " + e.property +
                        "; witness: " + e.witness + "]")
                           .c_str());
        }
    });

    py::class_<Schema>(m, "Schema")
        .def(py::init(&parse_schema_text), py::arg("text"),
             "Schema from text like 'ISBN:str, Price:num'")
        .def("names",
             [](const Schema& s) {
                 std::vector<std::string> out;
                 for (const auto& a : s.attrs()) out.push_back(a.name);
                 return out;
             })
        .def("__len__", &Schema::arity)
        .def("__eq__", [](const Schema& a, const Schema& b) { return a == b; })
        .def("__str__", &Schema::text)
        .def("__repr__", [](const Schema& s) { return "Schema(\"" + s.text() + "\")"; });

    py::class_<Relation>(m, "Relation")
        .def(py::init(&make_relation), py::arg("schema"), py::arg("rows") = py::list(),
             "Relation over a schema; rows are sequences of str, int, Fraction, "
             "float, or decimal strings")
        .def_property_readonly("schema", &Relation::schema)
        .def("rows", &relation_rows, "Tuples in canonical order")
        .def("__len__", &Relation::size)
        .def("__eq__", [](const Relation& a, const Relation& b) { return a == b; })
        .def("__repr__", [](const Relation& r) {
            return "Relation(" + r.schema().text() + ", " + std::to_string(r.size()) +
                   " rows)";
        });

    m.def("load_csv", &load_csv, py::arg("path"), py::arg("schema"));
    m.def(
        "to_csv", [](const Relation& r) { return render_relation(r, OutputFormat::Csv); },
        py::arg("relation"));

    py::class_<Formula>(m, "Formula")
        .def_property_readonly("schema", &Formula::schema)
        .def_property_readonly("vars", &Formula::vars)
        .def("__str__", &Formula::text)
        .def("__eq__", [](const Formula& a, const Formula& b) { return a == b; })
        .def("__repr__", [](const Formula& f) { return "Formula(\"" + f.text() + "\")"; });

    m.def(
        "pref",
        [](const std::string& text, const Schema& schema, const std::string& v1,
           const std::string& v2) {
            return parse_pref_formula(text, schema, v1, v2, Budget{});
        },
        py::arg("text"), py::arg("schema"), py::arg("v1") = "t1", py::arg("v2") = "t2",
        "Preference formula over two tuple variables");
    m.def(
        "selection",
        [](const std::string& text, const Schema& schema) {
            return parse_selection(text, schema, Budget{});
        },
        py::arg("text"), py::arg("schema"), "Single-variable condition like \"t.Price < 15\"");

    m.def(
        "dominates",
        [](const Formula& f, const py::sequence& a, const py::sequence& b) {
            auto row = [&f](const py::sequence& cells) {
                const Schema& s = f.schema();
                if (py::len(cells) != s.arity())
                    throw SchemaError("row arity does not match the preference schema");
                std::vector<Value> values;
                for (size_t i = 0; i < s.arity(); ++i)
                    values.push_back(py_to_value(cells[i], s.at(i).sort));
                return Tuple(std::move(values));
            };
            return dominates(f, row(a), row(b));
        },
        py::arg("pref"), py::arg("t1"), py::arg("t2"),
        "Whether row t1 is preferred to row t2");
    m.def(
        "check_properties",
        [](const Formula& f) {
            PropertyReport rep = check_properties(f);
            py::dict out;
            out["irreflexive"] = check_to_dict(rep.irreflexive);
            out["asymmetric"] = check_to_dict(rep.asymmetric);
            out["transitive"] = check_to_dict(rep.transitive);
            out["negatively_transitive"] = check_to_dict(rep.negatively_transitive);
            out["connected"] = check_to_dict(rep.connected);
            out["strict_partial_order"] = rep.strict_partial_order();
            out["weak_order"] = rep.weak_order();
            out["total_order"] = rep.total_order();
            return out;
        },
        py::arg("pref"), "Order properties with witnesses for the failing ones");

    // winnow family
    m.def(
        "winnow",
        [](const Formula& c, const Relation& r, const std::string& algo, size_t window,
           bool force) { return winnow(c, r, make_options(algo, window, force)); },
        py::arg("pref"), py::arg("relation"), py::arg("algo") = "nl", py::arg("window") = 64,
        py::arg("force") = false, "Tuples no other tuple is preferred to");
    m.def(
        "weak_winnow",
        [](const Formula& c, const Relation& r, const std::string& algo, size_t window,
           bool force) { return weak_winnow(c, r, make_options(algo, window, force)); },
        py::arg("pref"), py::arg("relation"), py::arg("algo") = "nl", py::arg("window") = 64,
        py::arg("force") = false);
    m.def(
        "winnow_iter",
        [](const Formula& c, const Relation& r, size_t n, const std::string& algo,
           size_t window, bool force) {
            return winnow_iter(c, r, n, make_options(algo, window, force));
        },
        py::arg("pref"), py::arg("relation"), py::arg("n"), py::arg("algo") = "nl",
        py::arg("window") = 64, py::arg("force") = false,
        "n-th stratum: winnow after removing the first n-1 strata");
    m.def(
        "rank",
        [](const Formula& c, const Relation& r, const std::string& algo, size_t window,
           bool force) {
            RankResult res = rank(c, r, make_options(algo, window, force));
            return py::make_tuple(res.ranked, res.unranked);
        },
        py::arg("pref"), py::arg("relation"), py::arg("algo") = "nl", py::arg("window") = 64,
        py::arg("force") = false,
        "(relation extended with a rank column, unrankable leftover)");

    // composition
    m.def(
        "boolean_compose",
        [](const std::string& op, const Formula& a, const Formula& b) {
            if (op == "union") return boolean_compose(SetOp::Union, a, b);
            if (op == "intersection") return boolean_compose(SetOp::Intersection, a, b);
            if (op == "difference") return boolean_compose(SetOp::Difference, a, b);
            throw ParseError("unknown set operation '" + op + "'");
        },
        py::arg("op"), py::arg("c1"), py::arg("c2"));
    m.def(
        "prioritized", [](const Formula& a, const Formula& b) { return prioritized(a, b); },
        py::arg("c1"), py::arg("c2"), "Prefer by c2 unless c1 applies");
    m.def(
        "pareto", [](const Formula& a, const Formula& b) { return pareto(a, b); },
        py::arg("c1"), py::arg("c2"), "Componentwise composition over the product schema");
    m.def(
        "restrict_to",
        [](const Formula& c, const std::vector<std::string>& attrs) {
            return restrict_to(c, attrs);
        },
        py::arg("pref"), py::arg("attrs"));
    m.def(
        "transitive_closure", [](const Formula& c) { return transitive_closure(c); },
        py::arg("pref"));
    m.def(
        "strict_core",
        [](const Formula& c, bool force) { return strict_core(c, Budget{}, force); },
        py::arg("pref"), py::arg("force") = false);
    m.def(
        "skyline",
        [](const std::vector<std::pair<std::string, std::string>>& entries,
           const Schema& schema) {
            SkylineClause clause;
            for (const auto& [attr, mode] : entries) {
                if (mode == "min")
                    clause.entries.push_back({attr, SkyMode::Min});
                else if (mode == "max")
                    clause.entries.push_back({attr, SkyMode::Max});
                else if (mode == "diff")
                    clause.entries.push_back({attr, SkyMode::Diff});
                else
                    throw ParseError("unknown skyline mode '" + mode + "'");
            }
            return skyline_formula(clause, schema);
        },
        py::arg("entries"), py::arg("schema"),
        "Dominance formula from [(attr, 'min'|'max'|'diff'), ...]");
    m.def(
        "scoring",
        [](const std::string& attr, py::handle slack, const Schema& schema) {
            return scoring_formula({attr, py_to_rational(slack)}, schema);
        },
        py::arg("score_attr"), py::arg("slack"), py::arg("schema"));

    // plans and scripts
    py::class_<PyPlan>(m, "Plan")
        .def_property_readonly("schema", [](const PyPlan& p) { return p.plan->schema(); })
        .def("tree", [](const PyPlan& p) { return p.plan->tree_text(); })
        .def("__str__", [](const PyPlan& p) { return p.plan->text(); })
        .def("__repr__", [](const PyPlan& p) { return "Plan(\"" + p.plan->text() + "\")"; });

    py::class_<PyScript>(m, "Script")
        .def_property_readonly("result", [](const PyScript& s) { return PyPlan{s.script.result}; })
        .def("pref",
             [](const PyScript& s, const std::string& name) {
                 auto it = s.script.prefs.find(name);
                 if (it == s.script.prefs.end())
                     throw EngineError("script defines no preference '" + name + "'");
                 return it->second;
             })
        .def("relation",
             [](const PyScript& s, const std::string& name) {
                 auto it = s.script.catalog.find(name);
                 if (it == s.script.catalog.end())
                     throw EngineError("script defines no relation '" + name + "'");
                 return it->second;
             })
        .def("plan",
             [](const PyScript& s, const std::string& expr) {
                 return PyPlan{parse_plan_expr(expr, s.script)};
             })
        .def("evaluate",
             [](const PyScript& s, const PyPlan& p) { return evaluate(p.plan, s.script.catalog); });

    m.def(
        "load_script", [](const std::string& path) { return PyScript{load_script(path)}; },
        py::arg("path"));
    m.def(
        "parse_script",
        [](const std::string& text, const std::string& base_dir) {
            return PyScript{parse_script(text, base_dir)};
        },
        py::arg("text"), py::arg("base_dir") = "");
    m.def(
        "optimize",
        [](const PyPlan& p) {
            OptimizeResult res = optimize(p.plan);
            py::list trace;
            for (const TraceEntry& e : res.trace) trace.append(trace_to_dict(e));
            return py::make_tuple(PyPlan{res.plan}, trace);
        },
        py::arg("plan"), "(optimized plan, rewrite trace)");
    m.def(
        "expand_winnow", [](const PyPlan& p) { return PyPlan{expand_winnow(p.plan)}; },
        py::arg("plan"), "Replace winnow nodes by select/product/difference plans");
    m.def(
        "run_script",
        [](const std::string& path, const std::string& algo, size_t window, bool force,
           bool optimize_plan) {
            Script sc = load_script(path);
            PlanPtr plan = apply_options(sc.result, make_options(algo, window, force));
            if (optimize_plan) plan = optimize(plan).plan;
            return evaluate(plan, sc.catalog);
        },
        py::arg("path"), py::arg("algo") = "nl", py::arg("window") = 64,
        py::arg("force") = false, py::arg("optimize") = true,
        "Load, optimize, and evaluate a query script");
}

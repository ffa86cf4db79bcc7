#include "prefq/compose.hpp"
#include "prefq/errors.hpp"
#include "prefq/props.hpp"
#include "prefq/render.hpp"
#include "prefq/rewrite.hpp"
#include "prefq/script.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <string>

using namespace prefq;

namespace {

struct RunFlags {
    std::string script;
    std::string algo = "nl";
    size_t window = 64;
    bool force = false;
    bool optimize = true;
    std::string output = "table";
    bool expand = false;
    size_t budget = Budget{}.max_disjuncts;

    Budget make_budget() const { return Budget{budget}; }
    WinnowOptions options() const {
        WinnowOptions o;
        o.algo = parse_algo(algo);
        o.window = window;
        o.force = force;
        o.budget = make_budget();
        return o;
    }
};

struct FormulaFlags {
    std::string script;
    std::string pref;
    std::string schema;
    std::string formula;
    size_t budget = Budget{}.max_disjuncts;
};

void add_budget_flag(CLI::App* cmd, size_t& budget) {
    cmd->add_option("--budget", budget, "Largest DNF the solver may build, in disjuncts");
}

// The preference a formula-oriented subcommand talks about: either --pref
// from a script, or a formula string over --schema.
Formula resolve_formula(const FormulaFlags& flags) {
    Budget budget{flags.budget};
    if (!flags.script.empty()) {
        if (flags.pref.empty())
            throw ParseError("--script needs --pref to name a preference");
        Script sc = load_script(flags.script, budget);
        auto it = sc.prefs.find(flags.pref);
        if (it == sc.prefs.end())
            throw ParseError("script defines no preference '" + flags.pref + "'");
        return it->second;
    }
    if (flags.schema.empty())
        throw ParseError("give either --script with --pref, or --schema with a formula");
    if (flags.formula.empty()) throw ParseError("missing formula text");
    return parse_pref_formula(flags.formula, parse_schema_text(flags.schema), "t1", "t2",
                              budget);
}

std::string witness_text(const std::vector<Tuple>& witness) {
    std::string out;
    for (size_t i = 0; i < witness.size(); ++i) {
        if (i) out += ", ";
        out += "t" + std::to_string(i + 1) + "=" + witness[i].display();
    }
    return out;
}

void print_check(const std::string& name, const PropertyCheck& check, std::ostream& out) {
    out << name << ": " << (check.holds ? "yes" : "no");
    if (!check.holds && !check.witness.empty()) out << "; witness " << witness_text(check.witness);
    out << '\n';
}

int cmd_check(const FormulaFlags& flags) {
    Formula f = resolve_formula(flags);
    PropertyReport report = check_properties(f, Budget{flags.budget});
    std::cout << "formula: " << f.text() << '\n';
    std::cout << "schema: " << f.schema().text() << '\n';
    print_check("irreflexive", report.irreflexive, std::cout);
    print_check("asymmetric", report.asymmetric, std::cout);
    print_check("transitive", report.transitive, std::cout);
    print_check("negatively transitive", report.negatively_transitive, std::cout);
    print_check("connected", report.connected, std::cout);
    std::cout << "strict partial order: " << (report.strict_partial_order() ? "yes" : "no")
              << '\n';
    std::cout << "weak order: " << (report.weak_order() ? "yes" : "no") << '\n';
    std::cout << "total order: " << (report.total_order() ? "yes" : "no") << '\n';
    return 0;
}

int cmd_closure(const FormulaFlags& flags) {
    Formula f = resolve_formula(flags);
    std::cout << transitive_closure(f, Budget{flags.budget}).text() << '\n';
    return 0;
}

void print_trace(const std::vector<TraceEntry>& trace, std::ostream& out) {
    if (trace.empty()) {
        out << "  (no rewrites considered)\n";
        return;
    }
    for (const TraceEntry& e : trace) {
        out << "  " << (e.applied ? "fired  " : "refused") << ' ' << rule_name(e.rule) << " @ "
            << e.location << '\n';
        out << "    precondition: " << e.precondition << '\n';
        out << "    verdict: " << e.verdict;
        if (!e.detail.empty()) out << " (" << e.detail << ')';
        out << '\n';
    }
}

int cmd_plan(const RunFlags& flags) {
    Script sc = load_script(flags.script, flags.make_budget());
    PlanPtr before = apply_options(sc.result, flags.options());
    std::cout << "plan:\n" << before->tree_text();
    PlanPtr after = before;
    if (flags.optimize) {
        OptimizeResult res = optimize(before, flags.make_budget());
        after = res.plan;
        std::cout << "\noptimized:\n" << after->tree_text();
        std::cout << "\nrewrites:\n";
        print_trace(res.trace, std::cout);
    }
    if (flags.expand) {
        std::cout << "\nexpanded:\n" << expand_winnow(after)->tree_text();
    }
    return 0;
}

int cmd_run(const RunFlags& flags) {
    Script sc = load_script(flags.script, flags.make_budget());
    PlanPtr plan = apply_options(sc.result, flags.options());
    if (flags.optimize) plan = optimize(plan, flags.make_budget()).plan;
    if (flags.expand) plan = expand_winnow(plan);
    Relation result = evaluate(plan, sc.catalog);
    render_relation(result, parse_output_format(flags.output), std::cout);
    return 0;
}

void add_run_flags(CLI::App* cmd, RunFlags& flags) {
    cmd->add_option("script", flags.script, "Query script path")->required();
    cmd->add_option("--algo", flags.algo, "Winnow algorithm: oracle, nl, bnl, or sfs")
        ->check(CLI::IsMember({"oracle", "nl", "bnl", "sfs"}));
    cmd->add_option("--window", flags.window, "Tuple window for bnl and sfs");
    cmd->add_flag("--force-algo", flags.force,
                  "Run the chosen algorithm even if the preference lacks the required "
                  "order properties");
    cmd->add_flag("--optimize,!--no-optimize", flags.optimize,
                  "Apply algebraic rewrites before evaluating (default on)");
    cmd->add_flag("--expand-winnow", flags.expand,
                  "Replace winnow nodes by select/product/difference plans");
    add_budget_flag(cmd, flags.budget);
}

void add_formula_flags(CLI::App* cmd, FormulaFlags& flags) {
    cmd->add_option("formula", flags.formula, "Preference formula over t1, t2");
    cmd->add_option("--script", flags.script, "Query script defining the preference");
    cmd->add_option("--pref", flags.pref, "Preference name within --script");
    cmd->add_option("--schema", flags.schema, "Schema for the formula, e.g. \"A:num, B:str\"");
    add_budget_flag(cmd, flags.budget);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Preference queries over CSV relations"};
    app.require_subcommand(1);

    RunFlags run_flags;
    CLI::App* run = app.add_subcommand("run", "Evaluate a query script");
    add_run_flags(run, run_flags);
    run->add_option("--output", run_flags.output, "Result format: table, csv, or json")
        ->check(CLI::IsMember({"table", "csv", "json"}));

    FormulaFlags check_flags;
    CLI::App* check = app.add_subcommand("check", "Report the order properties of a preference");
    add_formula_flags(check, check_flags);

    FormulaFlags closure_flags;
    CLI::App* closure =
        app.add_subcommand("closure", "Print the transitive closure of a preference");
    add_formula_flags(closure, closure_flags);

    RunFlags plan_flags;
    CLI::App* plan = app.add_subcommand("plan", "Show a script's plan, rewrites, and trace");
    add_run_flags(plan, plan_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(run_flags);
        if (check->parsed()) return cmd_check(check_flags);
        if (closure->parsed()) return cmd_closure(closure_flags);
        if (plan->parsed()) return cmd_plan(plan_flags);
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return 3;
    } catch (const GateError& e) {
        std::cerr << "refused: " << e.what() << '\n';
        std::cerr << "  violated property: " << e.property << '\n';
        std::cerr << "  witness: " << e.witness << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 5;
    }
}

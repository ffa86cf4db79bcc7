#include "doctest.h"

#include "prefq/compose.hpp"
#include "prefq/errors.hpp"
#include "prefq/plan.hpp"
#include "prefq/rewrite.hpp"
#include "prefq/solver.hpp"

#include <algorithm>
#include <random>

using namespace prefq;

namespace {

Schema book_schema() {
    return Schema({{"ISBN", Sort::Str}, {"Vendor", Sort::Str}, {"Price", Sort::Num}});
}

Tuple book(const char* isbn, const char* vendor, const char* price) {
    return Tuple({Value::str(isbn), Value::str(vendor), Value::num(parse_decimal(price))});
}

Relation books() {
    Relation r(book_schema());
    r.insert(book("0679726691", "BooksForLess", "14.75"));
    r.insert(book("0679726691", "LowestPrices", "13.50"));
    r.insert(book("0679726691", "QualityBooks", "18.80"));
    r.insert(book("0062059041", "BooksForLess", "7.30"));
    r.insert(book("0374164770", "LowestPrices", "21.88"));
    return r;
}

Formula pref(const Schema& s, const std::string& text) {
    return parse_pref_formula(text, s, "t1", "t2", Budget{});
}

Formula sel(const Schema& s, const std::string& text) {
    return parse_selection(text, s, Budget{});
}

Formula books_c1() { return pref(book_schema(), "t1.ISBN = t2.ISBN and t1.Price < t2.Price"); }

Catalog book_catalog() { return {{"book", books()}}; }

PlanPtr book_scan() { return Plan::scan("book", book_schema()); }

Relation rows(const Schema& s, std::vector<Tuple> ts) { return Relation(s, std::move(ts)); }

std::vector<const TraceEntry*> entries_for(const OptimizeResult& res, Rule rule) {
    std::vector<const TraceEntry*> out;
    for (const auto& e : res.trace)
        if (e.rule == rule) out.push_back(&e);
    return out;
}

size_t applied_count(const OptimizeResult& res, Rule rule) {
    size_t n = 0;
    for (const auto& e : res.trace)
        if (e.rule == rule && e.applied) ++n;
    return n;
}

void check_trace_invariant(const OptimizeResult& res) {
    for (const auto& e : res.trace)
        if (e.applied) CHECK(e.verdict == "valid");
}

} // namespace

TEST_CASE("scan looks its relation up in the catalog") {
    Catalog cat = book_catalog();
    CHECK(evaluate(book_scan(), cat) == books());
    CHECK_THROWS_AS(evaluate(Plan::scan("missing", book_schema()), cat), EngineError);
    Schema wrong({{"ISBN", Sort::Str}, {"Vendor", Sort::Str}, {"Price", Sort::Str}});
    CHECK_THROWS_AS(evaluate(Plan::scan("book", wrong), cat), SchemaError);
}

TEST_CASE("select filters rows and type-checks its condition") {
    Catalog cat = book_catalog();
    Relation cheap = evaluate(Plan::select(sel(book_schema(), "t.Price < 15"), book_scan()), cat);
    CHECK(cheap == rows(book_schema(), {book("0679726691", "BooksForLess", "14.75"),
                                        book("0679726691", "LowestPrices", "13.50"),
                                        book("0062059041", "BooksForLess", "7.30")}));

    CHECK_THROWS_AS(Plan::select(books_c1(), book_scan()), SchemaError);
    Schema other({{"X", Sort::Num}});
    CHECK_THROWS_AS(Plan::select(sel(other, "t.X < 1"), book_scan()), SchemaError);
}

TEST_CASE("a veto selection after winnow leaves the winnow result unchanged") {
    Catalog cat = book_catalog();
    PlanPtr w = Plan::winnow(books_c1(), book_scan());
    PlanPtr vetoed = Plan::select(sel(book_schema(), "t.Vendor <> 'QualityBooks'"), w);
    Relation expected = rows(book_schema(), {book("0679726691", "LowestPrices", "13.50"),
                                             book("0062059041", "BooksForLess", "7.30"),
                                             book("0374164770", "LowestPrices", "21.88")});
    CHECK(evaluate(w, cat) == expected);
    CHECK(evaluate(vetoed, cat) == expected);
}

TEST_CASE("project reorders and deduplicates") {
    Catalog cat = book_catalog();
    PlanPtr p = Plan::project({"Vendor"}, book_scan());
    CHECK(p->schema().text() == "(Vendor:str)");
    CHECK(evaluate(p, cat).size() == 3);

    PlanPtr q = Plan::project({"Price", "ISBN"}, book_scan());
    CHECK(q->schema().text() == "(Price:num, ISBN:str)");
    CHECK(evaluate(q, cat).size() == 5);

    CHECK_THROWS_AS(Plan::project({"Nope"}, book_scan()), SchemaError);
    CHECK_THROWS_AS(Plan::project({}, book_scan()), SchemaError);
}

TEST_CASE("product renames colliding right-hand attributes") {
    PlanPtr p = Plan::product(book_scan(), book_scan());
    CHECK(p->schema().text() ==
          "(ISBN:str, Vendor:str, Price:num, ISBN_r:str, Vendor_r:str, Price_r:num)");
    Catalog cat = book_catalog();
    CHECK(evaluate(p, cat).size() == 25);
}

TEST_CASE("union and difference require compatible schemas and keep left names") {
    Schema r_schema({{"A", Sort::Num}, {"B", Sort::Str}});
    Schema s_schema({{"X", Sort::Num}, {"Y", Sort::Str}});
    Relation r(r_schema, {Tuple({Value::num(1L), Value::str("p")}),
                          Tuple({Value::num(2L), Value::str("q")})});
    Relation s(s_schema, {Tuple({Value::num(2L), Value::str("q")}),
                          Tuple({Value::num(3L), Value::str("z")})});
    Catalog cat{{"r", r}, {"s", s}};

    PlanPtr u = Plan::set_union(Plan::scan("r", r_schema), Plan::scan("s", s_schema));
    CHECK(u->schema() == r_schema);
    CHECK(evaluate(u, cat).size() == 3);

    PlanPtr d = Plan::set_difference(Plan::scan("r", r_schema), Plan::scan("s", s_schema));
    CHECK(evaluate(d, cat) == rows(r_schema, {Tuple({Value::num(1L), Value::str("p")})}));

    Schema bad({{"A", Sort::Str}, {"B", Sort::Str}});
    CHECK_THROWS_AS(Plan::set_union(Plan::scan("r", r_schema), Plan::scan("bad", bad)),
                    SchemaError);
}

TEST_CASE("extend appends an exactly computed num column") {
    Catalog cat = book_catalog();
    ArithExpr expr = ArithExpr::binary(
        '-', ArithExpr::attribute("Price"),
        ArithExpr::binary('*', ArithExpr::constant(parse_decimal("0.1")), ArithExpr::constant(3)));
    PlanPtr p = Plan::extend("Adjusted", expr, book_scan());
    CHECK(p->schema().text() == "(ISBN:str, Vendor:str, Price:num, Adjusted:num)");
    CHECK(expr.text() == "Price - (0.1 * 3)");

    Relation out = evaluate(p, cat);
    size_t price_at = out.schema().require("Price");
    size_t adj_at = out.schema().require("Adjusted");
    for (const Tuple& t : out.tuples())
        CHECK(t.at(adj_at).num() == t.at(price_at).num() - Rational(3, 10));

    CHECK_THROWS_AS(Plan::extend("Price", ArithExpr::constant(1), book_scan()), SchemaError);
    CHECK_THROWS_AS(Plan::extend("T", ArithExpr::attribute("Vendor"), book_scan()), SchemaError);
    CHECK_THROWS_AS(ArithExpr::binary('/', ArithExpr::constant(1), ArithExpr::constant(2)),
                    EngineError);
}

TEST_CASE("group count tallies distinct values per group") {
    Catalog cat = book_catalog();
    PlanPtr p = Plan::group_count({"Vendor"}, "ISBN", "Num", book_scan());
    CHECK(p->schema().text() == "(Vendor:str, Num:num)");
    Relation expected(p->schema());
    expected.insert(Tuple({Value::str("BooksForLess"), Value::num(2L)}));
    expected.insert(Tuple({Value::str("LowestPrices"), Value::num(2L)}));
    expected.insert(Tuple({Value::str("QualityBooks"), Value::num(1L)}));
    CHECK(evaluate(p, cat) == expected);

    // no group attributes: one global row
    PlanPtr total = Plan::group_count({}, "ISBN", "Titles", book_scan());
    CHECK(evaluate(total, cat) == rows(total->schema(), {Tuple({Value::num(3L)})}));

    CHECK_THROWS_AS(Plan::group_count({"Vendor"}, "Nope", "N", book_scan()), SchemaError);
    CHECK_THROWS_AS(Plan::group_count({"Vendor"}, "ISBN", "Vendor", book_scan()), SchemaError);
}

TEST_CASE("winnow family nodes evaluate like the underlying operators") {
    Catalog cat = book_catalog();
    Formula c1 = books_c1();
    Relation r = books();

    CHECK(evaluate(Plan::winnow(c1, book_scan()), cat) == winnow(c1, r));
    CHECK(evaluate(Plan::winnow_iter(c1, 2, book_scan()), cat) == winnow_iter(c1, r, 2));
    CHECK(evaluate(Plan::rank(c1, book_scan()), cat) == rank(c1, r).ranked);
    CHECK(evaluate(Plan::rank(c1, book_scan()), cat).schema().text() ==
          "(ISBN:str, Vendor:str, Price:num, rank:num)");
    Formula weak = pref(book_schema(), "t1.ISBN = t2.ISBN and t1.Price <= t2.Price");
    CHECK(evaluate(Plan::weak_winnow(weak, book_scan()), cat) == weak_winnow(weak, r));

    CHECK_THROWS_AS(Plan::winnow(sel(book_schema(), "t.Price < 1"), book_scan()), SchemaError);
    CHECK_THROWS_AS(Plan::winnow_iter(c1, 0, book_scan()), EngineError);

    // gates propagate: a blocked algorithm refuses a non-transitive preference
    WinnowOptions bnl;
    bnl.algo = Algo::BNL;
    Formula loose = pref(book_schema(), "t1.Price >= t2.Price");
    CHECK_THROWS_AS(evaluate(Plan::winnow(loose, book_scan(), bnl), cat), GateError);
}

TEST_CASE("vendor-count pipeline prefers offers from better-stocked vendors") {
    Catalog cat = book_catalog();
    PlanPtr counts = Plan::group_count({"Vendor"}, "ISBN", "Num", book_scan());
    PlanPtr joined = Plan::select(
        sel(Plan::product(book_scan(), counts)->schema(), "t.Vendor = t.Vendor_r"),
        Plan::product(book_scan(), counts));
    PlanPtr ext = Plan::project({"ISBN", "Vendor", "Num"}, joined);
    CHECK(ext->schema().text() == "(ISBN:str, Vendor:str, Num:num)");

    Formula c5 = pref(ext->schema(), "t1.ISBN = t2.ISBN and t1.Num > t2.Num");
    PlanPtr q = Plan::project({"ISBN", "Vendor"}, Plan::winnow(c5, ext));

    Relation expected(q->schema());
    expected.insert(Tuple({Value::str("0679726691"), Value::str("BooksForLess")}));
    expected.insert(Tuple({Value::str("0679726691"), Value::str("LowestPrices")}));
    expected.insert(Tuple({Value::str("0062059041"), Value::str("BooksForLess")}));
    expected.insert(Tuple({Value::str("0374164770"), Value::str("LowestPrices")}));
    CHECK(evaluate(q, cat) == expected);
}

TEST_CASE("plan text and tree rendering") {
    PlanPtr p = Plan::winnow(books_c1(), Plan::select(sel(book_schema(), "t.Price < 15"), book_scan()),
                             {}, "c1");
    CHECK(p->text() == "winnow[c1](select[t.Price < 15](book))");
    CHECK(p->node_count() == 3);
    std::string tree = p->tree_text();
    CHECK(tree.find("winnow[c1]  : (ISBN:str, Vendor:str, Price:num)") != std::string::npos);
    CHECK(tree.find("\n  select[t.Price < 15]") != std::string::npos);
    CHECK(tree.find("\n    book") != std::string::npos);

    PlanPtr it = Plan::winnow_iter(books_c1(), 2, book_scan());
    CHECK(it->text() ==
          "iter[t1.ISBN = t2.ISBN and t1.Price < t2.Price, 2](book)");
}

TEST_CASE("apply_options retargets every winnow-family node") {
    PlanPtr p = Plan::rank(books_c1(), Plan::winnow(books_c1(), book_scan()));
    WinnowOptions o;
    o.algo = Algo::SFS;
    o.window = 7;
    PlanPtr q = apply_options(p, o);
    CHECK(q->options().algo == Algo::SFS);
    CHECK(q->options().window == 7);
    CHECK(q->child()->options().algo == Algo::SFS);
    CHECK(evaluate(q, book_catalog()) == evaluate(p, book_catalog()));
}

TEST_CASE("selection pushing fires and refuses per the precondition") {
    Catalog cat = book_catalog();
    PlanPtr w = Plan::winnow(books_c1(), book_scan(), {}, "c1");

    SUBCASE("an upper price bound commutes with cheapest-offer winnow") {
        PlanPtr p = Plan::select(sel(book_schema(), "t.Price < 15"), w);
        OptimizeResult res = optimize(p);
        check_trace_invariant(res);
        CHECK(applied_count(res, Rule::PushSelection) == 1);
        CHECK(res.plan->text() == "winnow[c1](select[t.Price < 15](book))");
        CHECK(evaluate(res.plan, cat) == evaluate(p, cat));
        const TraceEntry& e = *entries_for(res, Rule::PushSelection).front();
        CHECK(e.location == "/");
        CHECK(e.verdict == "valid");
    }

    SUBCASE("a lower price bound does not commute and the trace shows why") {
        PlanPtr p = Plan::select(sel(book_schema(), "t.Price > 15"), w);
        OptimizeResult res = optimize(p);
        check_trace_invariant(res);
        CHECK(applied_count(res, Rule::PushSelection) == 0);
        CHECK(res.plan->text() == p->text());
        auto refusals = entries_for(res, Rule::PushSelection);
        REQUIRE(refusals.size() == 1);
        CHECK(refusals[0]->verdict == "invalid");
        REQUIRE(!refusals[0]->counterexample.empty());

        // the counterexample materializes to an instance where the two
        // plans really differ
        const solver::Assignment& cx = refusals[0]->counterexample;
        auto value_of = [&cx](const char* var, const char* attr, Value fallback) {
            auto it = cx.find({var, attr});
            return it == cx.end() ? fallback : it->second;
        };
        Relation inst(book_schema());
        for (const char* var : {"t1", "t2"})
            inst.insert(Tuple({value_of(var, "ISBN", Value::str("i")),
                               value_of(var, "Vendor", Value::str("v")),
                               value_of(var, "Price", Value::num(1L))}));
        REQUIRE(inst.size() == 2);
        Catalog tiny{{"book", inst}};
        PlanPtr pushed = Plan::winnow(books_c1(),
                                      Plan::select(sel(book_schema(), "t.Price > 15"), book_scan()),
                                      {}, "c1");
        CHECK(evaluate(p, tiny) != evaluate(pushed, tiny));
    }

    SUBCASE("an equality selection on the grouping attribute commutes") {
        PlanPtr p = Plan::select(sel(book_schema(), "t.ISBN = '0679726691'"), w);
        OptimizeResult res = optimize(p);
        check_trace_invariant(res);
        CHECK(applied_count(res, Rule::PushSelection) == 1);
        CHECK(evaluate(res.plan, cat) == evaluate(p, cat));
        CHECK(evaluate(res.plan, cat) ==
              rows(book_schema(), {book("0679726691", "LowestPrices", "13.50")}));
    }
}

TEST_CASE("selection pushing works through rank but not on the rank column") {
    Catalog cat = book_catalog();
    PlanPtr r = Plan::rank(books_c1(), book_scan(), {}, "c1");

    PlanPtr p = Plan::select(sel(r->schema(), "t.ISBN = '0679726691'"), r);
    OptimizeResult res = optimize(p);
    check_trace_invariant(res);
    CHECK(applied_count(res, Rule::PushSelection) == 1);
    CHECK(res.plan->op() == PlanOp::Rank);
    CHECK(evaluate(res.plan, cat) == evaluate(p, cat));
    // ranks are recomputed relative to the restricted input by the pushed
    // plan, and the precondition guarantees that makes no difference
    CHECK(evaluate(res.plan, cat).size() == 3);

    // a selection on the computed rank column stays where it is
    PlanPtr q = Plan::select(sel(r->schema(), "t.rank = 1"), r);
    OptimizeResult res2 = optimize(q);
    CHECK(applied_count(res2, Rule::PushSelection) == 0);
    CHECK(entries_for(res2, Rule::PushSelection).empty());
    CHECK(res2.plan->text() == q->text());
}

TEST_CASE("nested winnows collapse when one preference entails the other") {
    Catalog cat = book_catalog();

    SUBCASE("identical preferences: idempotence") {
        PlanPtr p = Plan::winnow(books_c1(), Plan::winnow(books_c1(), book_scan(), {}, "c1"), {},
                                 "c1");
        OptimizeResult res = optimize(p);
        check_trace_invariant(res);
        CHECK(applied_count(res, Rule::AbsorbWinnow) == 1);
        CHECK(res.plan->node_count() == 2);
        CHECK(evaluate(res.plan, cat) == evaluate(p, cat));
    }

    SUBCASE("a strictly stronger outer preference is absorbed by the inner one") {
        Formula inner = books_c1();
        Formula outer = pref(book_schema(),
                             "t1.ISBN = t2.ISBN and t1.Vendor = t2.Vendor and t1.Price < t2.Price");
        PlanPtr p = Plan::winnow(outer, Plan::winnow(inner, book_scan(), {}, "c1"));
        OptimizeResult res = optimize(p);
        check_trace_invariant(res);
        CHECK(applied_count(res, Rule::AbsorbWinnow) == 1);
        CHECK(res.plan->node_count() == 2);
        CHECK(res.plan->pref() == inner);
        CHECK(evaluate(res.plan, cat) == evaluate(p, cat));
    }
}

TEST_CASE("incomparable salary and year preferences do not absorb") {
    Schema emp({{"EmpNo", Sort::Num}, {"YearEmployed", Sort::Num}, {"Salary", Sort::Num}});
    Relation r(emp, {Tuple({Value::num(1L), Value::num(1975L), Value::num(100000L)}),
                     Tuple({Value::num(2L), Value::num(1980L), Value::num(150000L)})});
    Catalog cat{{"emp", r}};
    Formula by_salary = pref(emp, "t1.Salary > t2.Salary");
    Formula by_year = pref(emp, "t1.YearEmployed < t2.YearEmployed");

    PlanPtr salary_outer =
        Plan::winnow(by_salary, Plan::winnow(by_year, Plan::scan("emp", emp)));
    PlanPtr year_outer = Plan::winnow(by_year, Plan::winnow(by_salary, Plan::scan("emp", emp)));

    OptimizeResult res = optimize(salary_outer);
    check_trace_invariant(res);
    CHECK(applied_count(res, Rule::AbsorbWinnow) == 0);
    auto refusals = entries_for(res, Rule::AbsorbWinnow);
    REQUIRE(refusals.size() == 2); // one per direction
    for (const TraceEntry* e : refusals) {
        CHECK(e->verdict == "invalid");
        CHECK(!e->counterexample.empty());
    }

    // the winnow order genuinely matters here
    CHECK(evaluate(salary_outer, cat) ==
          rows(emp, {Tuple({Value::num(1L), Value::num(1975L), Value::num(100000L)})}));
    CHECK(evaluate(year_outer, cat) ==
          rows(emp, {Tuple({Value::num(2L), Value::num(1980L), Value::num(150000L)})}));
}

TEST_CASE("an entailed but non-asymmetric preference blocks absorption") {
    Schema s({{"X", Sort::Str}});
    Relation r(s, {Tuple({Value::str("a")}), Tuple({Value::str("b")})});
    Catalog cat{{"r", r}};
    Formula narrow = pref(s, "t1.X = 'a' and t2.X = 'b'");
    Formula cyclic = pref(s, "t1.X = 'a' and t2.X = 'b' or t1.X = 'b' and t2.X = 'a'");

    PlanPtr nested = Plan::winnow(cyclic, Plan::winnow(narrow, Plan::scan("r", s)));
    OptimizeResult res = optimize(nested);
    check_trace_invariant(res);
    CHECK(applied_count(res, Rule::AbsorbWinnow) == 0);

    bool saw_spo_refusal = false;
    for (const TraceEntry* e : entries_for(res, Rule::AbsorbWinnow))
        if (e->verdict == "invalid" && e->detail.find("not asymmetric") != std::string::npos)
            saw_spo_refusal = true;
    CHECK(saw_spo_refusal);

    // had the rule fired, the collapsed plan would change the answer
    PlanPtr collapsed = Plan::winnow(cyclic, Plan::scan("r", s));
    CHECK(evaluate(nested, cat) == rows(s, {Tuple({Value::str("a")})}));
    CHECK(evaluate(collapsed, cat).empty());

    // the reverse nesting evaluates differently, so commutation fails too
    PlanPtr reversed = Plan::winnow(narrow, Plan::winnow(cyclic, Plan::scan("r", s)));
    CHECK(evaluate(reversed, cat).empty());
}

TEST_CASE("projection pushing restricts the preference to the kept attributes") {
    Catalog cat = book_catalog();
    PlanPtr p = Plan::project({"ISBN", "Price"}, Plan::winnow(books_c1(), book_scan(), {}, "c1"));
    OptimizeResult res = optimize(p);
    check_trace_invariant(res);
    CHECK(applied_count(res, Rule::PushProjection) == 1);
    REQUIRE(res.plan->op() == PlanOp::Winnow);
    REQUIRE(res.plan->child()->op() == PlanOp::Project);
    CHECK(evaluate(res.plan, cat) == evaluate(p, cat));

    // the restricted preference is the same formula over (ISBN, Price)
    Schema sub({{"ISBN", Sort::Str}, {"Price", Sort::Num}});
    Formula expected = pref(sub, "t1.ISBN = t2.ISBN and t1.Price < t2.Price");
    const Formula& theta = res.plan->pref();
    Budget budget;
    CHECK(solver::implies(theta.instantiate(expected.vars()), expected.dnf(), sub, budget).implied);
    CHECK(solver::implies(expected.dnf(), theta.instantiate(expected.vars()), sub, budget).implied);
}

TEST_CASE("projecting every attribute pushes trivially") {
    Catalog cat = book_catalog();
    PlanPtr p = Plan::project({"Price", "ISBN", "Vendor"},
                              Plan::winnow(books_c1(), book_scan(), {}, "c1"));
    OptimizeResult res = optimize(p);
    check_trace_invariant(res);
    CHECK(applied_count(res, Rule::PushProjection) == 1);
    CHECK(res.plan->op() == PlanOp::Winnow);
    CHECK(res.plan->pref().dnf() == books_c1().dnf());
    CHECK(evaluate(res.plan, cat) == evaluate(p, cat));
}

TEST_CASE("projection does not push when dominance depends on a dropped attribute") {
    Schema s({{"A", Sort::Num}, {"B", Sort::Num}});
    Formula by_b = pref(s, "t1.B > t2.B");
    Relation r(s, {Tuple({Value::num(1L), Value::num(5L)}), Tuple({Value::num(1L), Value::num(0L)}),
                   Tuple({Value::num(2L), Value::num(3L)})});
    Catalog cat{{"r", r}};

    PlanPtr p = Plan::project({"A"}, Plan::winnow(by_b, Plan::scan("r", s)));
    OptimizeResult res = optimize(p);
    check_trace_invariant(res);
    CHECK(applied_count(res, Rule::PushProjection) == 0);
    auto refusals = entries_for(res, Rule::PushProjection);
    REQUIRE(refusals.size() == 1);
    CHECK(refusals[0]->verdict == "invalid");
    CHECK(!refusals[0]->counterexample.empty());

    // on this instance the naive push changes the answer: dominance by B
    // cannot be decided after B is gone
    Schema sub({{"A", Sort::Num}});
    PlanPtr naive =
        Plan::winnow(restrict_to(by_b, std::vector<std::string>{"A"}, Budget{}),
                     Plan::project({"A"}, Plan::scan("r", s)));
    CHECK(evaluate(p, cat) == rows(sub, {Tuple({Value::num(1L)})}));
    CHECK(evaluate(naive, cat) == rows(sub, {Tuple({Value::num(1L)}), Tuple({Value::num(2L)})}));
}

namespace {

Schema xy(const char* a, const char* b) {
    return Schema({{a, Sort::Num}, {b, Sort::Num}});
}

} // namespace

TEST_CASE("winnow of a componentwise preference distributes over a product") {
    Schema sx({{"X", Sort::Num}});
    Schema sy({{"Y", Sort::Num}});
    Relation r1(sx, {Tuple({Value::num(1L)})});
    Relation r2(sy, {Tuple({Value::num(1L)}), Tuple({Value::num(2L)})});
    Catalog cat{{"r1", r1}, {"r2", r2}};
    Formula gx = pref(sx, "t1.X > t2.X");
    Formula gy = pref(sy, "t1.Y > t2.Y");
    Formula c0 = pareto(gx, gy);

    PlanPtr prod = Plan::product(Plan::scan("r1", sx), Plan::scan("r2", sy));
    PlanPtr p = Plan::winnow(c0, prod);

    SUBCASE("construction provenance fires the rule") {
        OptimizeResult res = optimize(p);
        check_trace_invariant(res);
        CHECK(applied_count(res, Rule::DistributeProduct) == 1);
        REQUIRE(res.plan->op() == PlanOp::Product);
        CHECK(res.plan->child(0)->op() == PlanOp::Winnow);
        CHECK(res.plan->child(1)->op() == PlanOp::Winnow);
        Relation expected(p->schema());
        expected.insert(Tuple({Value::num(1L), Value::num(2L)}));
        CHECK(evaluate(res.plan, cat) == expected);
        CHECK(evaluate(p, cat) == expected);
    }

    SUBCASE("the same formula without provenance is recovered structurally") {
        Formula stripped(c0.schema(), c0.vars(), c0.dnf());
        REQUIRE(stripped.pareto_parts() == nullptr);
        OptimizeResult res = optimize(Plan::winnow(stripped, prod));
        check_trace_invariant(res);
        REQUIRE(applied_count(res, Rule::DistributeProduct) == 1);
        CHECK(entries_for(res, Rule::DistributeProduct).front()->detail ==
              "factors recovered structurally");
        CHECK(evaluate(res.plan, cat) == evaluate(p, cat));
    }

    SUBCASE("requiring strict improvement on both sides does not distribute") {
        Formula both(c0.schema(), c0.vars(),
                     pref(c0.schema(), "t1.X > t2.X and t1.Y > t2.Y").dnf());
        PlanPtr q = Plan::winnow(both, prod);
        OptimizeResult res = optimize(q);
        check_trace_invariant(res);
        CHECK(applied_count(res, Rule::DistributeProduct) == 0);
        auto refusals = entries_for(res, Rule::DistributeProduct);
        REQUIRE(refusals.size() == 1);
        CHECK(refusals[0]->verdict == "invalid");

        Relation kept = evaluate(q, cat);
        CHECK(kept.size() == 2); // nothing dominates anything componentwise-strictly
        PlanPtr distributed = Plan::product(Plan::winnow(gx, Plan::scan("r1", sx)),
                                            Plan::winnow(gy, Plan::scan("r2", sy)));
        CHECK(evaluate(distributed, cat).size() == 1);
    }

    SUBCASE("singleton times singleton") {
        Relation one(sy, {Tuple({Value::num(7L)})});
        Catalog tiny{{"r1", r1}, {"r2", one}};
        OptimizeResult res = optimize(p);
        CHECK(evaluate(res.plan, tiny) == evaluate(p, tiny));
        CHECK(evaluate(p, tiny).size() == 1);
    }
}

TEST_CASE("winnow distributes over union and difference only for empty preferences") {
    Schema s({{"A", Sort::Num}});
    Relation r1(s, {Tuple({Value::num(1L)}), Tuple({Value::num(2L)})});
    Relation r2(s, {Tuple({Value::num(2L)}), Tuple({Value::num(3L)})});
    Catalog cat{{"r1", r1}, {"r2", r2}};
    PlanPtr u = Plan::set_union(Plan::scan("r1", s), Plan::scan("r2", s));

    SUBCASE("an unsatisfiable preference fires over union") {
        Formula none = pref(s, "t1.A < t2.A and t1.A > t2.A");
        OptimizeResult res = optimize(Plan::winnow(none, u));
        check_trace_invariant(res);
        CHECK(applied_count(res, Rule::DistributeUnionDiff) == 1);
        REQUIRE(res.plan->op() == PlanOp::Union);
        CHECK(evaluate(res.plan, cat) == evaluate(u, cat));
    }

    SUBCASE("false fires over difference") {
        PlanPtr d = Plan::set_difference(Plan::scan("r1", s), Plan::scan("r2", s));
        OptimizeResult res = optimize(Plan::winnow(pref(s, "false"), d));
        check_trace_invariant(res);
        CHECK(applied_count(res, Rule::DistributeUnionDiff) == 1);
        CHECK(res.plan->op() == PlanOp::Diff);
        CHECK(evaluate(res.plan, cat) == rows(s, {Tuple({Value::num(1L)})}));
    }

    SUBCASE("any satisfiable preference refuses, shown by a two-tuple instance") {
        Formula less = pref(s, "t1.A < t2.A");
        PlanPtr p = Plan::winnow(less, u);
        OptimizeResult res = optimize(p);
        check_trace_invariant(res);
        CHECK(applied_count(res, Rule::DistributeUnionDiff) == 0);
        auto refusals = entries_for(res, Rule::DistributeUnionDiff);
        REQUIRE(refusals.size() == 1);
        CHECK(refusals[0]->verdict == "invalid");
        CHECK(!refusals[0]->counterexample.empty());

        // the regression instance from the distribution law: splitting a
        // dominated tuple away from its dominator changes the answer
        Relation a(s, {Tuple({Value::num(1L)})});
        Relation b(s, {Tuple({Value::num(2L)})});
        Catalog split{{"r1", a}, {"r2", b}};
        PlanPtr distributed = Plan::set_union(Plan::winnow(less, Plan::scan("r1", s)),
                                              Plan::winnow(less, Plan::scan("r2", s)));
        CHECK(evaluate(p, split) == rows(s, {Tuple({Value::num(1L)})}));
        CHECK(evaluate(distributed, split).size() == 2);
    }

    SUBCASE("renamed right-hand attributes are handled") {
        Schema t({{"Z", Sort::Num}});
        Relation r3(t, {Tuple({Value::num(5L)})});
        Catalog cat2{{"r1", r1}, {"r3", r3}};
        PlanPtr mixed = Plan::set_union(Plan::scan("r1", s), Plan::scan("r3", t));
        OptimizeResult res = optimize(Plan::winnow(pref(s, "false"), mixed));
        CHECK(applied_count(res, Rule::DistributeUnionDiff) == 1);
        CHECK(evaluate(res.plan, cat2).size() == 3);
    }
}

TEST_CASE("expanding winnow into plain algebra preserves its meaning") {
    Catalog cat = book_catalog();

    SUBCASE("cheapest-offer query expands to select/product/diff") {
        PlanPtr p = Plan::winnow(books_c1(), book_scan());
        PlanPtr expanded = expand_winnow(p);
        CHECK(expanded->op() == PlanOp::Diff);
        CHECK(evaluate(expanded, cat) == evaluate(p, cat));
        CHECK(evaluate(expanded, cat) ==
              rows(book_schema(), {book("0679726691", "LowestPrices", "13.50"),
                                   book("0062059041", "BooksForLess", "7.30"),
                                   book("0374164770", "LowestPrices", "21.88")}));
    }

    SUBCASE("false expands to the full input") {
        PlanPtr p = Plan::winnow(pref(book_schema(), "false"), book_scan());
        PlanPtr expanded = expand_winnow(p);
        CHECK(expanded->op() == PlanOp::Diff);
        CHECK(evaluate(expanded, cat) == books());
    }

    SUBCASE("nested winnows are both expanded") {
        PlanPtr p = Plan::winnow(books_c1(), Plan::winnow(books_c1(), book_scan()));
        PlanPtr expanded = expand_winnow(p);
        std::string text = expanded->text();
        CHECK(text.find("winnow") == std::string::npos);
        CHECK(evaluate(expanded, cat) == evaluate(p, cat));
    }

    SUBCASE("random formulas against the direct evaluation") {
        std::mt19937 rng(424242);
        Schema s = xy("A", "B");
        const char* pool[] = {
            "t1.A > t2.A",
            "t1.A = t2.A and t1.B < t2.B",
            "t1.A > t2.A and t1.B > t2.B",
            "t1.A >= t2.A and t1.B <> t2.B",
            "t1.A > t2.A or t1.A = t2.A and t1.B > t2.B",
            "t1.A > 2 and t2.B < 3",
            "t1.B < 2 or t2.A = 1",
        };
        for (int trial = 0; trial < 60; ++trial) {
            Formula c = pref(s, pool[rng() % std::size(pool)]);
            Relation r(s);
            size_t n = rng() % 7;
            for (size_t i = 0; i < n; ++i)
                r.insert(Tuple({Value::num(long(rng() % 4)), Value::num(long(rng() % 4))}));
            Catalog c2{{"r", r}};
            PlanPtr p = Plan::winnow(c, Plan::scan("r", s));
            WinnowOptions oracle;
            oracle.algo = Algo::Oracle;
            INFO("formula ", c.text());
            CHECK(evaluate(expand_winnow(p), c2) == winnow(c, r, oracle));
        }
    }
}

TEST_CASE("difference simulated by winnow over tagged rows") {
    Schema s({{"A", Sort::Num}, {"B", Sort::Str}});
    auto t = [](long a, const char* b) { return Tuple({Value::num(a), Value::str(b)}); };

    SUBCASE("drops exactly the shared rows") {
        Relation r(s, {t(1, "p"), t(2, "q")});
        Relation rs(s, {t(2, "q")});
        Catalog cat{{"r", r}, {"s", rs}};
        PlanPtr d = diff_via_winnow(Plan::scan("r", s), Plan::scan("s", s));
        CHECK(evaluate(d, cat) == rows(s, {t(1, "p")}));
        CHECK(d->schema() == s);
    }

    SUBCASE("equal relations give the empty difference") {
        Relation r(s, {t(1, "p"), t(2, "q")});
        Catalog cat{{"r", r}, {"s", r}};
        CHECK(evaluate(diff_via_winnow(Plan::scan("r", s), Plan::scan("s", s)), cat).empty());
    }

    SUBCASE("tag column name avoids collisions") {
        Schema with_tag({{"tag", Sort::Num}});
        Relation r(with_tag, {Tuple({Value::num(1L)})});
        Relation e(with_tag, {Tuple({Value::num(2L)})});
        Catalog cat{{"r", r}, {"s", e}};
        PlanPtr d = diff_via_winnow(Plan::scan("r", with_tag), Plan::scan("s", with_tag));
        CHECK(evaluate(d, cat) == r);
    }

    SUBCASE("random pairs match the native difference") {
        std::mt19937 rng(777);
        for (int trial = 0; trial < 40; ++trial) {
            Relation r(s), q(s);
            for (size_t i = 0, n = rng() % 6; i < n; ++i)
                r.insert(t(long(rng() % 3), rng() % 2 ? "x" : "y"));
            for (size_t i = 0, n = rng() % 6; i < n; ++i)
                q.insert(t(long(rng() % 3), rng() % 2 ? "x" : "y"));
            Catalog cat{{"r", r}, {"s", q}};
            PlanPtr native =
                Plan::set_difference(Plan::scan("r", s), Plan::scan("s", s));
            PlanPtr sim = diff_via_winnow(Plan::scan("r", s), Plan::scan("s", s));
            CHECK(evaluate(sim, cat) == evaluate(native, cat));
        }
    }

    SUBCASE("incompatible operands are rejected") {
        Schema other({{"A", Sort::Str}, {"B", Sort::Str}});
        CHECK_THROWS_AS(diff_via_winnow(Plan::scan("r", s), Plan::scan("q", other)), SchemaError);
    }
}

TEST_CASE("optimization never changes what a plan computes") {
    std::mt19937 rng(20240817);
    Schema s = xy("A", "B");
    Schema s2 = xy("C", "D");
    const char* prefs[] = {
        "t1.A > t2.A",
        "t1.A = t2.A and t1.B < t2.B",
        "t1.A > t2.A and t1.B > t2.B",
        "t1.A >= t2.A",
        "t1.A <> t2.A and t1.B > t2.B",
        "false",
        "t1.A < t2.A and t1.A > t2.A",
    };
    const char* sels[] = {
        "t.A < 2", "t.A > 1", "t.B = 0", "t.A > 0 and t.B < 3", "true",
    };

    auto random_relation = [&rng](const Schema& schema) {
        Relation r(schema);
        size_t n = 1 + rng() % 6;
        for (size_t i = 0; i < n; ++i)
            r.insert(Tuple({Value::num(long(rng() % 4)), Value::num(long(rng() % 4))}));
        return r;
    };

    for (int trial = 0; trial < 36; ++trial) {
        Catalog cat{{"r", random_relation(s)}, {"q", random_relation(s)},
                    {"u", random_relation(s2)}};
        Formula ca = pref(s, prefs[rng() % std::size(prefs)]);
        Formula cb = pref(s, prefs[rng() % std::size(prefs)]);
        Formula cond = sel(s, sels[rng() % std::size(sels)]);

        PlanPtr plan;
        switch (trial % 6) {
        case 0:
            plan = Plan::select(cond, Plan::winnow(ca, Plan::scan("r", s)));
            break;
        case 1:
            plan = Plan::winnow(ca, Plan::winnow(cb, Plan::scan("r", s)));
            break;
        case 2:
            plan = Plan::project({"A"}, Plan::winnow(ca, Plan::scan("r", s)));
            break;
        case 3:
            plan = Plan::winnow(ca, Plan::set_union(Plan::scan("r", s), Plan::scan("q", s)));
            break;
        case 4:
            plan = Plan::winnow(pareto(ca, pref(s2, "t1.C > t2.C")),
                                Plan::product(Plan::scan("r", s), Plan::scan("u", s2)));
            break;
        default:
            plan = Plan::select(
                cond, Plan::winnow(ca, Plan::set_difference(Plan::scan("r", s),
                                                            Plan::scan("q", s))));
            break;
        }

        OptimizeResult res = optimize(plan);
        check_trace_invariant(res);
        INFO("trial ", trial, ": ", plan->text(), "  ->  ", res.plan->text());
        CHECK(evaluate(res.plan, cat) == evaluate(plan, cat));
    }
}

TEST_CASE("rewrites inside larger plans report their location") {
    Catalog cat = book_catalog();
    PlanPtr branch = Plan::select(sel(book_schema(), "t.Price < 15"),
                                  Plan::winnow(books_c1(), book_scan(), {}, "c1"));
    PlanPtr p = Plan::set_union(branch, book_scan());
    OptimizeResult res = optimize(p);
    check_trace_invariant(res);
    auto fired = entries_for(res, Rule::PushSelection);
    REQUIRE(fired.size() == 1);
    CHECK(fired[0]->applied);
    CHECK(fired[0]->location == "/0");
    CHECK(evaluate(res.plan, cat) == evaluate(p, cat));
}

#include "doctest.h"

#include "prefq/compose.hpp"
#include "prefq/errors.hpp"
#include "prefq/render.hpp"
#include "prefq/rewrite.hpp"
#include "prefq/script.hpp"
#include "prefq/solver.hpp"

#include <filesystem>
#include <fstream>

using namespace prefq;

namespace {

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("prefq_script_test_" + std::to_string(++counter));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    void write(const std::string& name, const std::string& content) const {
        std::ofstream out(path / name);
        out << content;
    }
    std::string dir() const { return path.string(); }
};

const char* kBooksCsv = "ISBN,Vendor,Price\n"
                        "0679726691,BooksForLess,14.75\n"
                        "0679726691,LowestPrices,13.50\n"
                        "0679726691,QualityBooks,18.80\n"
                        "0062059041,BooksForLess,7.30\n"
                        "0374164770,LowestPrices,21.88\n";

const char* kBooksScript =
    "# cheapest offer per title\n"
    "relation book(ISBN:str, Vendor:str, Price:num) from \"books.csv\"\n"
    "pref c1 on book (t1, t2): t1.ISBN = t2.ISBN and t1.Price < t2.Price\n"
    "\n"
    "return winnow[c1](book)\n";

Script books_script(const TempDir& tmp) {
    tmp.write("books.csv", kBooksCsv);
    return parse_script(kBooksScript, tmp.dir());
}

Relation run(const Script& sc) { return evaluate(sc.result, sc.catalog); }

} // namespace

TEST_CASE("script with relation, pref, and return") {
    TempDir tmp;
    Script sc = books_script(tmp);
    CHECK(sc.relations.at("book").text() == "(ISBN:str, Vendor:str, Price:num)");
    CHECK(sc.catalog.at("book").size() == 5);
    CHECK(sc.prefs.count("c1") == 1);
    CHECK(sc.result->text() == "winnow[c1](book)");

    Relation out = run(sc);
    CHECK(out.size() == 3);
    CHECK(render_relation(out, OutputFormat::Csv) == "ISBN,Vendor,Price\n"
                                                     "0062059041,BooksForLess,7.3\n"
                                                     "0374164770,LowestPrices,21.88\n"
                                                     "0679726691,LowestPrices,13.5\n");
}

TEST_CASE("output formats share the canonical row order") {
    TempDir tmp;
    Relation out = run(books_script(tmp));

    CHECK(render_relation(out, OutputFormat::Table) ==
          "ISBN        Vendor        Price\n"
          "----------  ------------  -----\n"
          "0062059041  BooksForLess  7.3\n"
          "0374164770  LowestPrices  21.88\n"
          "0679726691  LowestPrices  13.5\n");

    CHECK(render_relation(out, OutputFormat::Json) ==
          "{\"ISBN\":\"0062059041\",\"Vendor\":\"BooksForLess\",\"Price\":\"7.3\"}\n"
          "{\"ISBN\":\"0374164770\",\"Vendor\":\"LowestPrices\",\"Price\":\"21.88\"}\n"
          "{\"ISBN\":\"0679726691\",\"Vendor\":\"LowestPrices\",\"Price\":\"13.5\"}\n");

    Relation counts(Schema({{"Vendor", Sort::Str}, {"Num", Sort::Num}}));
    counts.insert(Tuple({Value::str("BooksForLess"), Value::num(2L)}));
    CHECK(render_relation(counts, OutputFormat::Json) ==
          "{\"Vendor\":\"BooksForLess\",\"Num\":2}\n");

    CHECK_THROWS_AS(parse_output_format("xml"), ParseError);
    CHECK(parse_output_format("table") == OutputFormat::Table);
}

TEST_CASE("empty relation renders as header only") {
    Relation empty(Schema({{"A", Sort::Num}}));
    CHECK(render_relation(empty, OutputFormat::Table) == "A\n-\n");
    CHECK(render_relation(empty, OutputFormat::Csv) == "A\n");
    CHECK(render_relation(empty, OutputFormat::Json).empty());
}

TEST_CASE("schema text parser") {
    CHECK(parse_schema_text("A:num, B:str").text() == "(A:num, B:str)");
    CHECK(parse_schema_text("(X:num)").text() == "(X:num)");
    CHECK_THROWS_AS(parse_schema_text("A:int"), ParseError);
    CHECK_THROWS_AS(parse_schema_text(""), ParseError);
    CHECK_THROWS_AS(parse_schema_text("A:num) X"), ParseError);
    CHECK_THROWS_AS(parse_schema_text("A:num, A:str"), SchemaError);
}

TEST_CASE("plan expression operators parse and evaluate") {
    TempDir tmp;
    Script sc = books_script(tmp);

    auto result = [&sc](const std::string& text) {
        return evaluate(parse_plan_expr(text, sc), sc.catalog);
    };

    CHECK(result("select[t.Price < 15](book)").size() == 3);
    CHECK(result("project[ISBN](book)").size() == 3);
    CHECK(result("product(book, book)").size() == 25);
    CHECK(result("union(book, book)").size() == 5);
    CHECK(result("diff(book, book)").empty());
    CHECK(result("winnow[t1.ISBN = t2.ISBN and t1.Price < t2.Price](book)").size() == 3);
    CHECK(result("wwinnow[t1.ISBN = t2.ISBN and t1.Price <= t2.Price](book)").size() == 3);
    CHECK(result("rank[c1](book)").schema().has("rank"));
    CHECK(result("iter[c1, 2](book)").size() == 1);
    CHECK(result("groupcount[Vendor; distinct ISBN -> Num](book)").size() == 3);
    CHECK(result("groupcount[; distinct ISBN -> Num](book)").size() == 1);

    Relation ext = result("extend[Sale := Price - (1 + 0.5) * 2](book)");
    size_t at = ext.schema().require("Sale");
    size_t price = ext.schema().require("Price");
    for (const Tuple& t : ext.tuples()) CHECK(t.at(at).num() == t.at(price).num() - 3);

    // nested expression, named pref label survives in the plan text
    PlanPtr p = parse_plan_expr("project[ISBN, Vendor](winnow[c1](select[t.Price < 20](book)))",
                                sc);
    CHECK(p->text() == "project[ISBN, Vendor](winnow[c1](select[t.Price < 20](book)))");
}

TEST_CASE("skyline sugar builds the componentwise dominance winnow") {
    TempDir tmp;
    tmp.write("points.csv", "X,Y\n1,0.5\n2,1\n2,2.25\n3,1.75\n3.5,1.5\n4,2\n4.5,0.75\n5,1\n");
    Script sc = parse_script("relation points(X:num, Y:num) from \"points.csv\"\n"
                             "return skyline[X max, Y max](points)\n",
                             tmp.dir());
    Relation out = run(sc);
    Relation expected(sc.relations.at("points"));
    expected.insert(Tuple({Value::num(2L), Value::num(parse_decimal("2.25"))}));
    expected.insert(Tuple({Value::num(4L), Value::num(2L)}));
    expected.insert(Tuple({Value::num(5L), Value::num(1L)}));
    CHECK(out == expected);

    // diff entries split the space; min flips the order
    Script sc2 = parse_script("relation points(X:num, Y:num) from \"points.csv\"\n"
                              "return skyline[X diff, Y min](points)\n",
                              tmp.dir());
    CHECK(run(sc2).size() == 7); // only the two X=2 points compete

    CHECK_THROWS_AS(parse_plan_expr("skyline[X up](points)", sc), ParseError);
    CHECK_THROWS_AS(parse_plan_expr("skyline[X diff, Y diff](points)", sc), SchemaError);
}

TEST_CASE("script parse errors carry the line number") {
    TempDir tmp;
    tmp.write("books.csv", kBooksCsv);
    auto parse_err = [&tmp](const std::string& text) {
        try {
            parse_script(text, tmp.dir());
            return std::string("no error");
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
    };

    CHECK(parse_err("frobnicate x\nreturn x\n").find("line 1") == 0);
    CHECK(parse_err("relation book(ISBN:str, Vendor:str, Price:num) from \"books.csv\"\n"
                    "return nope\n")
              .find("unknown relation or binding 'nope'") != std::string::npos);
    CHECK(parse_err("return winnow[q](book)\n").find("unknown relation") != std::string::npos);
    CHECK(parse_err("").find("no return") != std::string::npos);
    CHECK(parse_err("pref p on book (t1, t2): true\nreturn book\n")
              .find("unknown relation 'book'") != std::string::npos);

    std::string two_returns = "relation book(ISBN:str, Vendor:str, Price:num) from"
                              " \"books.csv\"\nreturn book\nreturn book\n";
    CHECK(parse_err(two_returns).find("after return") != std::string::npos);

    std::string dup = "relation book(ISBN:str, Vendor:str, Price:num) from \"books.csv\"\n"
                      "let book = book\nreturn book\n";
    CHECK(parse_err(dup).find("duplicate name 'book'") != std::string::npos);

    CHECK(parse_err("let x = winnow[t1.A < t2.A](missing)\nreturn x\n")
              .find("unknown relation or binding 'missing'") != std::string::npos);
}

TEST_CASE("plan expression parse errors") {
    TempDir tmp;
    Script sc = books_script(tmp);
    CHECK_THROWS_AS(parse_plan_expr("winnow[c1](book", sc), ParseError);
    CHECK_THROWS_AS(parse_plan_expr("winnow[c1 (book)", sc), ParseError);
    CHECK_THROWS_AS(parse_plan_expr("winnow[nosuch](book)", sc), ParseError);
    CHECK_THROWS_AS(parse_plan_expr("frob[c1](book)", sc), ParseError);
    CHECK_THROWS_AS(parse_plan_expr("product(book)", sc), ParseError);
    CHECK_THROWS_AS(parse_plan_expr("book extra", sc), ParseError);
    CHECK_THROWS_AS(parse_plan_expr("iter[c1](book)", sc), ParseError);
    CHECK_THROWS_AS(parse_plan_expr("iter[c1, x](book)", sc), ParseError);
    CHECK_THROWS_AS(parse_plan_expr("extend[Sale := Price / 2](book)", sc), ParseError);
    CHECK_THROWS_AS(parse_plan_expr("extend[Sale = Price](book)", sc), ParseError);
    CHECK_THROWS_AS(parse_plan_expr("groupcount[Vendor](book)", sc), ParseError);

    // misuse of a pref name with the wrong schema is a schema error
    CHECK_THROWS_AS(parse_plan_expr("winnow[c1](project[ISBN](book))", sc), SchemaError);
}

TEST_CASE("missing csv file surfaces as a runtime error") {
    TempDir tmp;
    CHECK_THROWS_AS(parse_script("relation r(A:num) from \"nope.csv\"\nreturn r\n", tmp.dir()),
                    EngineError);
    CHECK_THROWS_AS(load_script((tmp.path / "missing.pq").string()), EngineError);
}

TEST_CASE("wine and meal pairing under the three preference styles") {
    TempDir tmp;
    tmp.write("dish.csv", "Dish,DishType\nsalmon,fish\nsteak,meat\ntofu,veggie\n");
    tmp.write("wine.csv", "Wine,WineType\nchardonnay,white\nmerlot,red\nrose,rose\n");
    std::string meal_schema = "(Dish:str, DishType:str, Wine:str, WineType:str)";
    std::string script_text =
        "relation dish(Dish:str, DishType:str) from \"dish.csv\"\n"
        "relation wine(Wine:str, WineType:str) from \"wine.csv\"\n"
        "let meal = product(dish, wine)\n"
        "pref c2 on " + meal_schema + " (t1, t2): "
        "t1.Dish = t2.Dish and t1.DishType = 'fish' and t1.WineType = 'white' and "
        "t2.DishType = 'fish' and t2.WineType = 'red' or "
        "t1.Dish = t2.Dish and t1.DishType = 'meat' and t1.WineType = 'red' and "
        "t2.DishType = 'meat' and t2.WineType = 'white'\n"
        "pref c3 on " + meal_schema + " (t1, t2): "
        "t1.Dish = t2.Dish and t1.DishType = 'fish' and t1.WineType = 'white' and "
        "t2.DishType = 'fish' and t2.WineType <> 'white' or "
        "t1.Dish = t2.Dish and t1.DishType = 'meat' and t1.WineType = 'red' and "
        "t2.DishType = 'meat' and t2.WineType <> 'red'\n"
        "pref c4 on " + meal_schema + " (t1, t2): "
        "t1.Dish = t2.Dish and t1.WineType = 'red' and t2.WineType <> 'red'\n"
        "return winnow[c2](meal)\n";
    Script sc = parse_script(script_text, tmp.dir());

    // relative preference: rose meals and all tofu meals survive
    Relation relative = run(sc);
    CHECK(relative.size() == 7);

    // absolute conditional preference: one wine per typed dish, tofu keeps all
    Relation absolute = evaluate(parse_plan_expr("winnow[c3](meal)", sc), sc.catalog);
    CHECK(absolute.size() == 5);

    // unconditional preference: only the red-wine meal per dish
    Relation unconditional = evaluate(parse_plan_expr("winnow[c4](meal)", sc), sc.catalog);
    CHECK(unconditional.size() == 3);
    for (const Tuple& t : unconditional.tuples()) CHECK(t.at(3).str() == "red");

    // in the absence of white wine, red is selected for fish
    tmp.write("wine.csv", "Wine,WineType\nmerlot,red\n");
    Script no_white = parse_script(script_text, tmp.dir());
    Relation fallback = run(no_white);
    CHECK(fallback.size() == 3);
}

TEST_CASE("layered conditions simulated by winnow under a transitive closure") {
    TempDir tmp;
    Script sc = books_script(tmp);
    Schema book = sc.relations.at("book");

    std::string c_text =
        "t1.Vendor = 'BooksForLess' and t1.Price < 10 and "
        "t2.Vendor = 'BooksForLess' and t2.Price >= 10 or "
        "t1.Vendor = 'BooksForLess' and t1.Price >= 10 and t2.Vendor <> 'BooksForLess'";
    Formula c = parse_pref_formula(c_text, book, "t1", "t2", Budget{});
    Formula cstar = transitive_closure(c, Budget{});

    // the closure adds the chained layer: P1-and-P2 rows beat not-P1 rows
    std::string handwritten = c_text +
        " or t1.Vendor = 'BooksForLess' and t1.Price < 10 and t2.Vendor <> 'BooksForLess'";
    Formula expected = parse_pref_formula(handwritten, book, "t1", "t2", Budget{});
    Budget budget;
    CHECK(solver::implies(cstar.dnf(), expected.dnf(), book, budget).implied);
    CHECK(solver::implies(expected.dnf(), cstar.dnf(), book, budget).implied);

    Script layered = sc;
    layered.prefs.emplace("cstar", cstar);
    Relation out = evaluate(
        parse_plan_expr("winnow[cstar](select[t.Price < 20](book))", layered),
        layered.catalog);
    Relation single(book);
    single.insert(Tuple({Value::str("0062059041"), Value::str("BooksForLess"),
                         Value::num(parse_decimal("7.30"))}));
    CHECK(out == single);

    // without any P1-and-P2 tuple the next layer wins
    Relation mid = evaluate(
        parse_plan_expr("winnow[cstar](select[t.Price >= 10](book))", layered),
        layered.catalog);
    Relation bfl(book);
    bfl.insert(Tuple({Value::str("0679726691"), Value::str("BooksForLess"),
                      Value::num(parse_decimal("14.75"))}));
    CHECK(mid == bfl);
}

TEST_CASE("vendor stocking pipeline from a script") {
    TempDir tmp;
    tmp.write("books.csv", kBooksCsv);
    Script sc = parse_script(
        "relation book(ISBN:str, Vendor:str, Price:num) from \"books.csv\"\n"
        "let counts = groupcount[Vendor; distinct ISBN -> Num](book)\n"
        "let joined = select[t.Vendor = t.Vendor_r](product(book, counts))\n"
        "let extbook = project[ISBN, Vendor, Num](joined)\n"
        "pref best on (ISBN:str, Vendor:str, Num:num) (t1, t2): "
        "t1.ISBN = t2.ISBN and t1.Num > t2.Num\n"
        "return project[ISBN, Vendor](winnow[best](extbook))\n",
        tmp.dir());
    Relation out = run(sc);
    CHECK(render_relation(out, OutputFormat::Csv) == "ISBN,Vendor\n"
                                                     "0062059041,BooksForLess\n"
                                                     "0374164770,LowestPrices\n"
                                                     "0679726691,BooksForLess\n"
                                                     "0679726691,LowestPrices\n");
}

TEST_CASE("optimizing a script plan leaves its rows unchanged") {
    TempDir tmp;
    tmp.write("books.csv", kBooksCsv);
    Script sc = parse_script(
        "relation book(ISBN:str, Vendor:str, Price:num) from \"books.csv\"\n"
        "pref c1 on book (t1, t2): t1.ISBN = t2.ISBN and t1.Price < t2.Price\n"
        "return select[t.Price < 15](winnow[c1](book))\n",
        tmp.dir());
    OptimizeResult res = optimize(sc.result);
    CHECK(res.plan->text() == "winnow[c1](select[t.Price < 15](book))");
    CHECK(evaluate(res.plan, sc.catalog) == evaluate(sc.result, sc.catalog));
}

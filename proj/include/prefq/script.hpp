#pragma once

#include "prefq/plan.hpp"

#include <map>
#include <string>

namespace prefq {

// A parsed query script. Statements, one per line, in order of use:
//
//   relation book(ISBN:str, Vendor:str, Price:num) from "books.csv"
//   pref c1 on book (t1, t2): t1.ISBN = t2.ISBN and t1.Price < t2.Price
//   let best = winnow[c1](book)
//   return project[ISBN, Vendor](best)
//
// `pref ... on` takes a relation name or an inline schema `(A:num, B:str)`.
// Blank lines and `#` comments are skipped. Exactly one `return`.
//
// Plan expressions:
//   winnow[c1](e)  wwinnow[c1](e)  rank[c1](e)  iter[c1, 2](e)
//   select[t.Price < 15](e)  project[ISBN, Price](e)
//   product(e1, e2)  union(e1, e2)  diff(e1, e2)
//   extend[Total := Price * 2 + 1](e)
//   groupcount[Vendor; distinct ISBN -> Num](e)
//   skyline[ISBN diff, Price min](e)
//
// A bare name is a let binding or a relation scan. The bracket of the
// winnow family accepts a pref name or an inline formula over t1, t2.
struct Script {
    Catalog catalog;
    std::map<std::string, Schema> relations;
    std::map<std::string, Formula> prefs;
    std::map<std::string, PlanPtr> lets;
    PlanPtr result;
};

// CSV paths resolve relative to base_dir (the script's directory).
Script parse_script(const std::string& text, const std::string& base_dir,
                    const Budget& budget = {});

Script load_script(const std::string& path, const Budget& budget = {});

// Parse one plan expression against existing definitions.
PlanPtr parse_plan_expr(const std::string& text, const Script& script,
                        const Budget& budget = {});

// "A:num, B:str" or "(A:num, B:str)".
Schema parse_schema_text(const std::string& text);

} // namespace prefq

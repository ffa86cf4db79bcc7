#include "prefq/script.hpp"

#include "prefq/compose.hpp"
#include "prefq/csv.hpp"
#include "prefq/errors.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace prefq {
namespace {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool is_identifier(const std::string& s) {
    if (s.empty() || (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_'))
        return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

struct Cursor {
    std::string_view s;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool try_eat(char c) {
        if (peek() != c) return false;
        ++pos;
        return true;
    }
    std::string rest() const {
        std::string_view r = s.substr(std::min(pos, s.size()));
        return r.empty() ? "<end of line>" : trim(r);
    }
    void expect(char c, const std::string& where) {
        if (!try_eat(c))
            throw ParseError("expected '" + std::string(1, c) + "' in " + where + " at: " +
                             rest());
    }
    std::string ident(const std::string& what) {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        if (start == pos) throw ParseError("expected " + what + " at: " + rest());
        return std::string(s.substr(start, pos - start));
    }
    void keyword(const std::string& word) {
        if (ident("'" + word + "'") != word)
            throw ParseError("expected '" + word + "' at: " + rest());
    }
};

// Text of a bracketed [...] section, honoring nesting and 'quotes'.
std::string bracket_text(Cursor& cur, const std::string& where) {
    cur.expect('[', where);
    std::string out;
    size_t depth = 1;
    bool quoted = false;
    while (cur.pos < cur.s.size()) {
        char c = cur.s[cur.pos++];
        if (quoted) {
            if (c == '\'') quoted = false;
        } else if (c == '\'') {
            quoted = true;
        } else if (c == '[') {
            ++depth;
        } else if (c == ']' && --depth == 0) {
            return trim(out);
        }
        out += c;
    }
    throw ParseError("unterminated '[' in " + where);
}

// Splits on top-level commas, honoring 'quotes'.
std::vector<std::string> comma_split(const std::string& text) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (char c : text) {
        if (quoted) {
            if (c == '\'') quoted = false;
        } else if (c == '\'') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(cell));
            cell.clear();
            continue;
        }
        cell += c;
    }
    out.push_back(trim(cell));
    return out;
}

Schema parse_schema_list(Cursor& cur) {
    cur.expect('(', "schema");
    std::vector<AttributeDef> attrs;
    while (true) {
        std::string name = cur.ident("an attribute name");
        cur.expect(':', "schema");
        attrs.push_back({name, parse_sort(cur.ident("a sort (num or str)"))});
        if (cur.try_eat(')')) break;
        cur.expect(',', "schema");
    }
    return Schema(std::move(attrs));
}

ArithExpr parse_arith(Cursor& cur);

ArithExpr parse_arith_factor(Cursor& cur) {
    char c = cur.peek();
    if (c == '(') {
        ++cur.pos;
        ArithExpr e = parse_arith(cur);
        cur.expect(')', "arithmetic expression");
        return e;
    }
    if (c == '-') {
        ++cur.pos;
        return ArithExpr::binary('-', ArithExpr::constant(0), parse_arith_factor(cur));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        size_t start = cur.pos;
        while (cur.pos < cur.s.size() &&
               (std::isdigit(static_cast<unsigned char>(cur.s[cur.pos])) ||
                cur.s[cur.pos] == '.'))
            ++cur.pos;
        return ArithExpr::constant(
            parse_decimal(cur.s.substr(start, cur.pos - start)));
    }
    return ArithExpr::attribute(cur.ident("an attribute or number"));
}

ArithExpr parse_arith_term(Cursor& cur) {
    ArithExpr e = parse_arith_factor(cur);
    while (true) {
        char c = cur.peek();
        if (c == '/') throw ParseError("division is not supported in extend expressions");
        if (c != '*') return e;
        ++cur.pos;
        e = ArithExpr::binary('*', std::move(e), parse_arith_factor(cur));
    }
}

ArithExpr parse_arith(Cursor& cur) {
    ArithExpr e = parse_arith_term(cur);
    while (true) {
        char c = cur.peek();
        if (c != '+' && c != '-') return e;
        ++cur.pos;
        e = ArithExpr::binary(c, std::move(e), parse_arith_term(cur));
    }
}

SkyMode parse_sky_mode(std::string word) {
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    if (word == "min") return SkyMode::Min;
    if (word == "max") return SkyMode::Max;
    if (word == "diff") return SkyMode::Diff;
    throw ParseError("unknown skyline mode '" + word + "' (expected min, max, or diff)");
}

struct ExprParser {
    const Script& script;
    const Budget& budget;

    Formula resolve_pref(const std::string& text, const Schema& schema,
                         std::string* label) const {
        if (is_identifier(text) && text != "true" && text != "false") {
            auto it = script.prefs.find(text);
            if (it == script.prefs.end())
                throw ParseError("unknown preference '" + text + "'");
            if (!(it->second.schema() == schema))
                throw SchemaError("preference '" + text + "' is over " +
                                  it->second.schema().text() + ", not " + schema.text());
            *label = text;
            return it->second;
        }
        return parse_pref_formula(text, schema, "t1", "t2", budget);
    }

    PlanPtr name_ref(const std::string& name) const {
        if (auto it = script.lets.find(name); it != script.lets.end()) return it->second;
        if (auto it = script.relations.find(name); it != script.relations.end())
            return Plan::scan(name, it->second);
        throw ParseError("unknown relation or binding '" + name + "'");
    }

    PlanPtr parse(Cursor& cur) const {
        std::string head = cur.ident("a plan expression");
        char next = cur.peek();
        if (next != '[' && next != '(') return name_ref(head);

        if (head == "product" || head == "union" || head == "diff") {
            cur.expect('(', head);
            PlanPtr left = parse(cur);
            cur.expect(',', head);
            PlanPtr right = parse(cur);
            cur.expect(')', head);
            if (head == "product") return Plan::product(left, right);
            if (head == "union") return Plan::set_union(left, right);
            return Plan::set_difference(left, right);
        }

        std::string bracket = bracket_text(cur, head);
        cur.expect('(', head);
        PlanPtr child = parse(cur);
        cur.expect(')', head);

        if (head == "winnow" || head == "wwinnow" || head == "rank") {
            std::string label;
            Formula f = resolve_pref(bracket, child->schema(), &label);
            if (head == "winnow") return Plan::winnow(f, child, {}, label);
            if (head == "wwinnow") return Plan::weak_winnow(f, child, {}, label);
            return Plan::rank(f, child, {}, label);
        }
        if (head == "iter") {
            size_t comma = bracket.rfind(',');
            if (comma == std::string::npos)
                throw ParseError("iter needs a preference and a count: iter[c, n]");
            std::string count = trim(bracket.substr(comma + 1));
            size_t n = 0;
            try {
                size_t used = 0;
                n = std::stoul(count, &used);
                if (used != count.size()) throw std::invalid_argument(count);
            } catch (const std::exception&) {
                throw ParseError("bad iteration count '" + count + "'");
            }
            std::string label;
            Formula f = resolve_pref(trim(bracket.substr(0, comma)), child->schema(), &label);
            return Plan::winnow_iter(f, n, child, {}, label);
        }
        if (head == "select")
            return Plan::select(parse_selection(bracket, child->schema(), budget), child);
        if (head == "project") return Plan::project(comma_split(bracket), child);
        if (head == "extend") {
            Cursor body{bracket};
            std::string name = body.ident("a new attribute name");
            body.expect(':', "extend");
            body.expect('=', "extend");
            ArithExpr e = parse_arith(body);
            if (!body.done())
                throw ParseError("trailing text in extend expression: " + body.rest());
            return Plan::extend(name, e, child);
        }
        if (head == "groupcount") {
            size_t semi = bracket.find(';');
            if (semi == std::string::npos)
                throw ParseError("groupcount needs 'attrs; distinct A -> N'");
            std::vector<std::string> groups;
            std::string group_part = trim(bracket.substr(0, semi));
            if (!group_part.empty()) groups = comma_split(group_part);
            Cursor tail{bracket};
            tail.pos = semi + 1;
            tail.keyword("distinct");
            std::string distinct = tail.ident("an attribute name");
            tail.expect('-', "groupcount");
            tail.expect('>', "groupcount");
            std::string out = tail.ident("an output attribute name");
            if (!tail.done())
                throw ParseError("trailing text in groupcount: " + tail.rest());
            return Plan::group_count(groups, distinct, out, child);
        }
        if (head == "skyline") {
            SkylineClause clause;
            for (const std::string& part : comma_split(bracket)) {
                Cursor entry{part};
                std::string attr = entry.ident("an attribute name");
                std::string mode = entry.ident("a skyline mode");
                if (!entry.done())
                    throw ParseError("trailing text in skyline entry: " + entry.rest());
                clause.entries.push_back({attr, parse_sky_mode(mode)});
            }
            return Plan::winnow(skyline_formula(clause, child->schema(), budget), child);
        }
        throw ParseError("unknown plan operator '" + head + "'");
    }
};

void define(Script& script, const std::string& name) {
    if (script.relations.count(name) || script.lets.count(name))
        throw ParseError("duplicate name '" + name + "'");
}

void parse_statement(Script& script, const std::string& line, const std::string& base_dir,
                     const Budget& budget) {
    Cursor cur{line};
    std::string head = cur.ident("a statement");

    if (head == "relation") {
        std::string name = cur.ident("a relation name");
        define(script, name);
        Schema schema = parse_schema_list(cur);
        cur.keyword("from");
        cur.expect('"', "relation path");
        size_t start = cur.pos;
        size_t end = cur.s.find('"', start);
        if (end == std::string_view::npos) throw ParseError("unterminated path string");
        std::filesystem::path path(std::string(cur.s.substr(start, end - start)));
        cur.pos = end + 1;
        if (!cur.done()) throw ParseError("trailing text: " + cur.rest());
        if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
        script.catalog.emplace(name, load_csv(path.string(), schema));
        script.relations.emplace(name, std::move(schema));
        return;
    }

    if (head == "pref") {
        std::string name = cur.ident("a preference name");
        if (script.prefs.count(name)) throw ParseError("duplicate name '" + name + "'");
        cur.keyword("on");
        Schema schema;
        if (cur.peek() == '(') {
            schema = parse_schema_list(cur);
        } else {
            std::string rel = cur.ident("a relation name or schema");
            auto it = script.relations.find(rel);
            if (it == script.relations.end())
                throw ParseError("unknown relation '" + rel + "'");
            schema = it->second;
        }
        cur.expect('(', "pref variables");
        std::string v1 = cur.ident("a tuple variable");
        cur.expect(',', "pref variables");
        std::string v2 = cur.ident("a tuple variable");
        cur.expect(')', "pref variables");
        cur.expect(':', "pref");
        script.prefs.emplace(name,
                             parse_pref_formula(cur.rest(), schema, v1, v2, budget));
        return;
    }

    if (head == "let") {
        std::string name = cur.ident("a binding name");
        define(script, name);
        cur.expect('=', "let");
        ExprParser parser{script, budget};
        PlanPtr plan = parser.parse(cur);
        if (!cur.done()) throw ParseError("trailing text: " + cur.rest());
        script.lets.emplace(name, std::move(plan));
        return;
    }

    if (head == "return") {
        ExprParser parser{script, budget};
        script.result = parser.parse(cur);
        if (!cur.done()) throw ParseError("trailing text: " + cur.rest());
        return;
    }

    throw ParseError("unknown statement '" + head + "'");
}

} // namespace

Script parse_script(const std::string& text, const std::string& base_dir,
                    const Budget& budget) {
    Script script;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        if (script.result) throw ParseError("line " + std::to_string(line_no) +
                                            ": statement after return");
        try {
            parse_statement(script, body, base_dir, budget);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const SchemaError& e) {
            throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!script.result) throw ParseError("script has no return statement");
    return script;
}

Script load_script(const std::string& path, const Budget& budget) {
    std::ifstream in(path);
    if (!in) throw EngineError("cannot open script '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_script(text.str(), std::filesystem::path(path).parent_path().string(), budget);
}

PlanPtr parse_plan_expr(const std::string& text, const Script& script, const Budget& budget) {
    Cursor cur{text};
    ExprParser parser{script, budget};
    PlanPtr plan = parser.parse(cur);
    if (!cur.done()) throw ParseError("trailing text: " + cur.rest());
    return plan;
}

Schema parse_schema_text(const std::string& text) {
    std::string wrapped = trim(text);
    if (wrapped.empty() || wrapped[0] != '(') wrapped = "(" + wrapped + ")";
    Cursor cur{wrapped};
    Schema schema = parse_schema_list(cur);
    if (!cur.done()) throw ParseError("trailing text: " + cur.rest());
    return schema;
}

} // namespace prefq

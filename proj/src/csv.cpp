#include "prefq/csv.hpp"
#include "prefq/errors.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

namespace prefq {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

} // namespace

Relation read_csv(std::istream& in, const Schema& schema) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("csv input is empty (missing header row)");
    auto header = split_line(line);
    if (header.size() != schema.arity())
        throw SchemaError("csv header has " + std::to_string(header.size()) +
                          " columns but schema " + schema.text() + " expects " +
                          std::to_string(schema.arity()));
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] != schema.at(i).name)
            throw SchemaError("csv header column '" + header[i] + "' does not match attribute '" +
                              schema.at(i).name + "'");

    Relation r(schema);
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto cells = split_line(line);
        if (cells.size() != schema.arity())
            throw ParseError("csv row " + std::to_string(row) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(schema.arity()));
        std::vector<Value> vals;
        vals.reserve(cells.size());
        for (size_t i = 0; i < cells.size(); ++i) {
            if (schema.at(i).sort == Sort::Num) {
                try {
                    vals.push_back(Value::num(parse_decimal(cells[i])));
                } catch (const ParseError&) {
                    throw ParseError("csv row " + std::to_string(row) + ", column " +
                                     schema.at(i).name + ": malformed number '" + cells[i] + "'");
                }
            } else {
                vals.push_back(Value::str(cells[i]));
            }
        }
        r.insert(Tuple(std::move(vals)));
    }
    return r;
}

Relation load_csv(const std::string& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw EngineError("cannot open csv file '" + path + "'");
    return read_csv(in, schema);
}

void write_csv(const Relation& r, std::ostream& out) {
    const Schema& s = r.schema();
    for (size_t i = 0; i < s.arity(); ++i) {
        if (i) out << ',';
        out << s.at(i).name;
    }
    out << '\n';
    for (const auto& t : r.tuples()) {
        for (size_t i = 0; i < t.arity(); ++i) {
            if (i) out << ',';
            std::string cell = t.at(i).display();
            if (cell.find(',') != std::string::npos || cell.find('\n') != std::string::npos)
                throw EngineError("csv cannot represent cell containing comma or newline: '" + cell + "'");
            out << cell;
        }
        out << '\n';
    }
}

} // namespace prefq

#include "prefq/render.hpp"

#include "prefq/csv.hpp"
#include "prefq/errors.hpp"

#include "json.hpp"

#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

namespace prefq {

OutputFormat parse_output_format(const std::string& name) {
    if (name == "table") return OutputFormat::Table;
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw ParseError("unknown output format '" + name + "'");
}

namespace {

void render_table(const Relation& r, std::ostream& out) {
    const Schema& s = r.schema();
    std::vector<std::string> header;
    std::vector<size_t> width;
    for (const auto& a : s.attrs()) {
        header.push_back(a.name);
        width.push_back(a.name.size());
    }
    std::vector<std::vector<std::string>> cells;
    for (const Tuple& t : r.tuples()) {
        std::vector<std::string> row;
        for (size_t i = 0; i < s.arity(); ++i) {
            row.push_back(t.at(i).display());
            width[i] = std::max(width[i], row.back().size());
        }
        cells.push_back(std::move(row));
    }
    auto line = [&](const std::vector<std::string>& row) {
        for (size_t i = 0; i < row.size(); ++i) {
            out << row[i];
            if (i + 1 < row.size()) out << std::string(width[i] - row[i].size() + 2, ' ');
        }
        out << '\n';
    };
    line(header);
    std::vector<std::string> rule;
    for (size_t w : width) rule.push_back(std::string(w, '-'));
    line(rule);
    for (const auto& row : cells) line(row);
}

void render_json(const Relation& r, std::ostream& out) {
    const Schema& s = r.schema();
    for (const Tuple& t : r.tuples()) {
        nlohmann::ordered_json obj;
        for (size_t i = 0; i < s.arity(); ++i) {
            const Value& v = t.at(i);
            if (v.sort() == Sort::Num && boost::multiprecision::denominator(v.num()) == 1 &&
                v.num() >= std::numeric_limits<long long>::min() &&
                v.num() <= std::numeric_limits<long long>::max())
                obj[s.at(i).name] =
                    boost::multiprecision::numerator(v.num()).convert_to<long long>();
            else
                obj[s.at(i).name] = v.display();
        }
        out << obj.dump() << '\n';
    }
}

} // namespace

void render_relation(const Relation& r, OutputFormat format, std::ostream& out) {
    switch (format) {
    case OutputFormat::Table:
        render_table(r, out);
        break;
    case OutputFormat::Csv:
        write_csv(r, out);
        break;
    case OutputFormat::Json:
        render_json(r, out);
        break;
    }
}

std::string render_relation(const Relation& r, OutputFormat format) {
    std::ostringstream out;
    render_relation(r, format, out);
    return out.str();
}

} // namespace prefq

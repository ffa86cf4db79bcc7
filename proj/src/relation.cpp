#include "prefq/relation.hpp"
#include "prefq/errors.hpp"

#include <algorithm>
#include <cctype>

namespace prefq {

namespace {

bool valid_name(std::string_view name) {
    if (name.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
    for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

} // namespace

Schema::Schema(std::vector<AttributeDef> attrs) : attrs_(std::move(attrs)) {
    if (attrs_.empty()) throw SchemaError("schema must have at least one attribute");
    for (size_t i = 0; i < attrs_.size(); ++i) {
        if (!valid_name(attrs_[i].name))
            throw SchemaError("invalid attribute name '" + attrs_[i].name + "'");
        for (size_t j = i + 1; j < attrs_.size(); ++j)
            if (attrs_[i].name == attrs_[j].name)
                throw SchemaError("duplicate attribute name '" + attrs_[i].name + "'");
    }
}

std::optional<size_t> Schema::index_of(std::string_view name) const {
    for (size_t i = 0; i < attrs_.size(); ++i)
        if (attrs_[i].name == name) return i;
    return std::nullopt;
}

size_t Schema::require(std::string_view name) const {
    auto i = index_of(name);
    if (!i) throw SchemaError("unknown attribute '" + std::string(name) + "' in schema " + text());
    return *i;
}

bool Schema::compatible(const Schema& other) const {
    if (arity() != other.arity()) return false;
    for (size_t i = 0; i < arity(); ++i)
        if (attrs_[i].sort != other.attrs_[i].sort) return false;
    return true;
}

std::string Schema::text() const {
    std::string out = "(";
    for (size_t i = 0; i < attrs_.size(); ++i) {
        if (i) out += ", ";
        out += attrs_[i].name;
        out += ":";
        out += sort_name(attrs_[i].sort);
    }
    return out + ")";
}

std::strong_ordering operator<=>(const Tuple& a, const Tuple& b) {
    size_t n = std::min(a.arity(), b.arity());
    for (size_t i = 0; i < n; ++i) {
        auto c = a.values_[i] <=> b.values_[i];
        if (c != std::strong_ordering::equal) return c;
    }
    return a.arity() <=> b.arity();
}

std::string Tuple::display() const {
    std::string out = "(";
    for (size_t i = 0; i < values_.size(); ++i) {
        if (i) out += ", ";
        out += values_[i].display();
    }
    return out + ")";
}

void check_tuple(const Schema& s, const Tuple& t) {
    if (t.arity() != s.arity())
        throw SchemaError("tuple arity " + std::to_string(t.arity()) + " does not match schema " + s.text());
    for (size_t i = 0; i < s.arity(); ++i)
        if (t.at(i).sort() != s.at(i).sort)
            throw SchemaError("value '" + t.at(i).display() + "' has sort " + sort_name(t.at(i).sort()) +
                              " but attribute " + s.at(i).name + " expects " + sort_name(s.at(i).sort));
}

Schema project_schema(const Schema& s, std::span<const std::string> names) {
    std::vector<AttributeDef> defs;
    for (const auto& n : names) defs.push_back(s.attrs()[s.require(n)]);
    return Schema(std::move(defs));
}

Tuple project_tuple(const Schema& s, const Tuple& t, std::span<const std::string> names) {
    std::vector<Value> vals;
    for (const auto& n : names) vals.push_back(t.at(s.require(n)));
    return Tuple(std::move(vals));
}

Schema product_schema(const Schema& left, const Schema& right) {
    std::vector<AttributeDef> attrs = left.attrs();
    auto taken = [&attrs](const std::string& name) {
        for (const auto& a : attrs)
            if (a.name == name) return true;
        return false;
    };
    for (const auto& a : right.attrs()) {
        std::string name = a.name;
        while (taken(name)) name += "_r";
        attrs.push_back({std::move(name), a.sort});
    }
    return Schema(std::move(attrs));
}

Relation::Relation(Schema schema, std::vector<Tuple> tuples) : schema_(std::move(schema)) {
    for (auto& t : tuples) insert(std::move(t));
}

void Relation::insert(Tuple t) {
    check_tuple(schema_, t);
    auto it = std::lower_bound(tuples_.begin(), tuples_.end(), t);
    if (it != tuples_.end() && *it == t) return;
    tuples_.insert(it, std::move(t));
}

bool Relation::contains(const Tuple& t) const {
    return std::binary_search(tuples_.begin(), tuples_.end(), t);
}

} // namespace prefq

#pragma once

#include "prefq/value.hpp"

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace prefq {

struct AttributeDef {
    std::string name;
    Sort sort;
    friend bool operator==(const AttributeDef&, const AttributeDef&) = default;
};

// An ordered list of uniquely named, sorted attributes. Arity >= 1.
class Schema {
public:
    Schema() = default;
    explicit Schema(std::vector<AttributeDef> attrs);

    size_t arity() const { return attrs_.size(); }
    const AttributeDef& at(size_t i) const { return attrs_.at(i); }
    const std::vector<AttributeDef>& attrs() const { return attrs_; }

    std::optional<size_t> index_of(std::string_view name) const;
    // Like index_of but throws SchemaError when missing.
    size_t require(std::string_view name) const;
    Sort sort_of(std::string_view name) const { return attrs_[require(name)].sort; }
    bool has(std::string_view name) const { return index_of(name).has_value(); }

    // Same arity and sorts position by position; names may differ. This is
    // the compatibility notion for union and difference.
    bool compatible(const Schema& other) const;

    std::string text() const; // "(ISBN:str, Price:num)"

    friend bool operator==(const Schema&, const Schema&) = default;

private:
    std::vector<AttributeDef> attrs_;
};

// A tuple of values; schema conformance is checked at insertion points.
class Tuple {
public:
    Tuple() = default;
    explicit Tuple(std::vector<Value> values) : values_(std::move(values)) {}

    size_t arity() const { return values_.size(); }
    const Value& at(size_t i) const { return values_.at(i); }
    const std::vector<Value>& values() const { return values_; }

    std::string display() const; // "(0679726691, BooksForLess, 14.75)"

    friend bool operator==(const Tuple&, const Tuple&) = default;
    friend std::strong_ordering operator<=>(const Tuple& a, const Tuple& b);

private:
    std::vector<Value> values_;
};

// Throws SchemaError unless t conforms to s (arity and per-position sorts).
void check_tuple(const Schema& s, const Tuple& t);

// Schema/tuple projection onto a list of existing attribute names.
Schema project_schema(const Schema& s, std::span<const std::string> names);
Tuple project_tuple(const Schema& s, const Tuple& t, std::span<const std::string> names);

// Concatenation for a Cartesian product: left attributes unchanged,
// right-hand names get "_r" appended while they collide with an earlier
// name.
Schema product_schema(const Schema& left, const Schema& right);

// A set of tuples over one schema. Tuples are kept deduplicated in a
// canonical (lexicographic) order, so relations compare by value.
class Relation {
public:
    Relation() = default;
    explicit Relation(Schema schema) : schema_(std::move(schema)) {}
    Relation(Schema schema, std::vector<Tuple> tuples);

    const Schema& schema() const { return schema_; }
    const std::vector<Tuple>& tuples() const { return tuples_; }
    size_t size() const { return tuples_.size(); }
    bool empty() const { return tuples_.empty(); }

    void insert(Tuple t);
    bool contains(const Tuple& t) const;

    friend bool operator==(const Relation&, const Relation&) = default;

private:
    Schema schema_;
    std::vector<Tuple> tuples_;
};

} // namespace prefq

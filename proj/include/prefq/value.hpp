#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <string>
#include <string_view>
#include <variant>

namespace prefq {

using Rational = boost::multiprecision::cpp_rational;

// The two attribute sorts. Num is an exact rational with a dense total
// order; Str is an uninterpreted constant supporting only (in)equality.
enum class Sort { Num, Str };

const char* sort_name(Sort s);

// Parses "num" / "str".
Sort parse_sort(std::string_view text);

// Exact decimal-to-rational conversion: "-12.50" -> -25/2. Accepts an
// optional sign, digits, and an optional fractional part. Throws ParseError.
Rational parse_decimal(std::string_view text);

// Shortest exact rendering: terminating decimal when the reduced
// denominator is of the form 2^a*5^b ("13.5"), otherwise "p/q".
std::string decimal_string(const Rational& q);

// A single attribute value of either sort.
class Value {
public:
    Value() : v_(Rational(0)) {}

    static Value num(Rational q) { return Value(std::move(q)); }
    static Value num(long n) { return Value(Rational(n)); }
    static Value str(std::string s) { return Value(std::move(s)); }

    Sort sort() const { return std::holds_alternative<Rational>(v_) ? Sort::Num : Sort::Str; }
    const Rational& num() const { return std::get<Rational>(v_); }
    const std::string& str() const { return std::get<std::string>(v_); }

    // Rendering for tables/CSV (bare text) and for formula literals
    // (numbers bare, strings single-quoted).
    std::string display() const;
    std::string literal() const;

    friend bool operator==(const Value& a, const Value& b) { return a.v_ == b.v_; }
    // Structural order (Num sorts before Str) so values can key containers.
    friend std::strong_ordering operator<=>(const Value& a, const Value& b);

private:
    explicit Value(Rational q) : v_(std::move(q)) {}
    explicit Value(std::string s) : v_(std::move(s)) {}
    std::variant<Rational, std::string> v_;
};

// Semantic comparison of two same-sort values: -1, 0, or +1.
// Throws SchemaError on a sort mismatch.
int compare_values(const Value& a, const Value& b);

} // namespace prefq

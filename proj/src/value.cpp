#include "prefq/value.hpp"
#include "prefq/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace prefq {

using BigInt = boost::multiprecision::cpp_int;

const char* sort_name(Sort s) {
    return s == Sort::Num ? "num" : "str";
}

Sort parse_sort(std::string_view text) {
    if (text == "num") return Sort::Num;
    if (text == "str") return Sort::Str;
    throw ParseError("unknown sort '" + std::string(text) + "' (expected num or str)");
}

Rational parse_decimal(std::string_view text) {
    size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        neg = text[i] == '-';
        ++i;
    }
    BigInt mantissa = 0;
    size_t digits = 0, frac_digits = 0;
    bool seen_dot = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_dot) throw ParseError("malformed number '" + std::string(text) + "'");
            seen_dot = true;
        } else if (c >= '0' && c <= '9') {
            mantissa = mantissa * 10 + (c - '0');
            ++digits;
            if (seen_dot) ++frac_digits;
        } else {
            throw ParseError("malformed number '" + std::string(text) + "'");
        }
    }
    if (digits == 0) throw ParseError("malformed number '" + std::string(text) + "'");
    BigInt den = 1;
    for (size_t k = 0; k < frac_digits; ++k) den *= 10;
    Rational q(mantissa, den);
    return neg ? Rational(-q) : q;
}

std::string decimal_string(const Rational& q) {
    BigInt num = boost::multiprecision::numerator(q);
    BigInt den = boost::multiprecision::denominator(q);
    // Check whether den = 2^a * 5^b; if so the expansion terminates.
    BigInt d = den;
    unsigned a = 0, b = 0;
    while (d % 2 == 0) { d /= 2; ++a; }
    while (d % 5 == 0) { d /= 5; ++b; }
    if (d != 1) return num.str() + "/" + den.str();
    unsigned k = a > b ? a : b;
    // Scale numerator to denominator 10^k.
    BigInt pow10 = 1;
    for (unsigned i = 0; i < k; ++i) pow10 *= 10;
    BigInt scaled = num * (pow10 / den);
    bool neg = scaled < 0;
    if (neg) scaled = -scaled;
    std::string digits = scaled.str();
    std::string out;
    if (k == 0) {
        out = digits;
    } else {
        if (digits.size() <= k) digits.insert(0, k + 1 - digits.size(), '0');
        out = digits.substr(0, digits.size() - k) + "." + digits.substr(digits.size() - k);
        while (out.back() == '0') out.pop_back();
        if (out.back() == '.') out.pop_back();
    }
    return neg ? "-" + out : out;
}

std::string Value::display() const {
    if (sort() == Sort::Num) return decimal_string(num());
    return str();
}

std::string Value::literal() const {
    if (sort() == Sort::Num) return decimal_string(num());
    return "'" + str() + "'";
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.sort() != b.sort())
        return a.sort() == Sort::Num ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.sort() == Sort::Num) {
        if (a.num() < b.num()) return std::strong_ordering::less;
        if (a.num() > b.num()) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
    return a.str() <=> b.str();
}

int compare_values(const Value& a, const Value& b) {
    if (a.sort() != b.sort())
        throw SchemaError(std::string("cannot compare ") + sort_name(a.sort()) + " with " + sort_name(b.sort()));
    if (a.sort() == Sort::Num) {
        if (a.num() < b.num()) return -1;
        if (a.num() > b.num()) return 1;
        return 0;
    }
    if (a.str() < b.str()) return -1;
    if (a.str() > b.str()) return 1;
    return 0;
}

} // namespace prefq

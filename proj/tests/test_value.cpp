#include "doctest.h"

#include "prefq/errors.hpp"
#include "prefq/value.hpp"

using namespace prefq;

TEST_CASE("decimal parsing is exact") {
    CHECK(parse_decimal("14.75") == Rational(59, 4));
    CHECK(parse_decimal("13.50") == Rational(27, 2));
    CHECK(parse_decimal("-0.1") == Rational(-1, 10));
    CHECK(parse_decimal("+7") == Rational(7));
    CHECK(parse_decimal("0.0") == Rational(0));
    CHECK(parse_decimal("000.125") == Rational(1, 8));
    CHECK_THROWS_AS(parse_decimal(""), ParseError);
    CHECK_THROWS_AS(parse_decimal("."), ParseError);
    CHECK_THROWS_AS(parse_decimal("1.2.3"), ParseError);
    CHECK_THROWS_AS(parse_decimal("1e5"), ParseError);
    CHECK_THROWS_AS(parse_decimal("12a"), ParseError);
}

TEST_CASE("decimal printing is minimal and exact") {
    CHECK(decimal_string(Rational(27, 2)) == "13.5");
    CHECK(decimal_string(Rational(59, 4)) == "14.75");
    CHECK(decimal_string(Rational(7)) == "7");
    CHECK(decimal_string(Rational(0)) == "0");
    CHECK(decimal_string(Rational(-1, 10)) == "-0.1");
    CHECK(decimal_string(Rational(1, 8)) == "0.125");
    CHECK(decimal_string(Rational(1, 3)) == "1/3");
    CHECK(decimal_string(Rational(-5, 6)) == "-5/6");
    CHECK(decimal_string(Rational(100)) == "100");
    CHECK(decimal_string(Rational(120, 10)) == "12");
}

TEST_CASE("parse and print round trip") {
    for (const char* s : {"14.75", "13.5", "7.3", "21.88", "0", "-3.125", "1000000"}) {
        CHECK(decimal_string(parse_decimal(s)) == s);
    }
}

TEST_CASE("value semantics") {
    Value a = Value::num(parse_decimal("1.5"));
    Value b = Value::num(Rational(3, 2));
    Value c = Value::str("1.5");
    CHECK(a == b);
    CHECK_FALSE(a == c);
    CHECK(compare_values(a, b) == 0);
    CHECK(compare_values(Value::num(1), Value::num(2)) == -1);
    CHECK(compare_values(Value::str("b"), Value::str("a")) == 1);
    CHECK_THROWS_AS(compare_values(a, c), SchemaError);
    CHECK(a.display() == "1.5");
    CHECK(c.display() == "1.5");
    CHECK(c.literal() == "'1.5'");
    CHECK(sort_name(a.sort()) == std::string("num"));
    CHECK(sort_name(c.sort()) == std::string("str"));
}

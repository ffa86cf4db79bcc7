#pragma once

#include <stdexcept>
#include <string>

namespace prefq {

// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text: formulas, scripts, plan expressions, CSV cells.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Schema violations: unknown attributes, sort mismatches, incompatible
// operands, duplicate names.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& msg) : Error(msg) {}
};

// An algorithm refused to run because the preference relation lacks a
// required order property. Carries the property name and a rendered
// counterexample.
class GateError : public Error {
public:
    GateError(const std::string& msg, std::string property, std::string witness)
        : Error(msg), property(std::move(property)), witness(std::move(witness)) {}
    std::string property;
    std::string witness;
};

// A DNF operation exceeded the configured disjunct budget.
class BudgetError : public Error {
public:
    explicit BudgetError(const std::string& msg) : Error(msg) {}
};

// Runtime failures: missing files, unknown names, cyclic dominance input
// to the sort-filter algorithm, and similar.
class EngineError : public Error {
public:
    explicit EngineError(const std::string& msg) : Error(msg) {}
};

} // namespace prefq

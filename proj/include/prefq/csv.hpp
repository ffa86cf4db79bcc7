#pragma once

#include "prefq/relation.hpp"

#include <iosfwd>
#include <string>

namespace prefq {

// Plain CSV with a mandatory header row naming the schema's attributes in
// order. Cells are unquoted and must not contain commas or newlines.
// Duplicate rows collapse (relations are sets).

Relation read_csv(std::istream& in, const Schema& schema);
Relation load_csv(const std::string& path, const Schema& schema);

void write_csv(const Relation& r, std::ostream& out);

} // namespace prefq

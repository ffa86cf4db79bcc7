#pragma once

#include "prefq/relation.hpp"

#include <iosfwd>
#include <string>

namespace prefq {

enum class OutputFormat { Table, Csv, Json };

// Map a --output flag value (table|csv|json) to a format.
OutputFormat parse_output_format(const std::string& name);

// Print the relation in canonical row order. Table pads columns to their
// widest cell; Csv matches the loader's format; Json emits one object per
// line with integers as JSON numbers and all other values as their exact
// literal text.
void render_relation(const Relation& r, OutputFormat format, std::ostream& out);

std::string render_relation(const Relation& r, OutputFormat format);

} // namespace prefq

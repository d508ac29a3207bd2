#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace behavsteg::detail {

/// Splits one CSV record. Double-quoted fields may contain commas and
/// doubled quotes; embedded newlines are not supported.
/// Throws std::invalid_argument on an unterminated quote.
std::vector<std::string> split_csv_record(std::string_view line);

/// Quotes `field` only when it contains a comma, quote, or leading/trailing
/// whitespace.
std::string quote_csv_field(std::string_view field);

}  // namespace behavsteg::detail

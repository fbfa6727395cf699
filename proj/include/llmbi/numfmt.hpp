#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace llmbi {

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);

/// Strict full-string parse (surrounding spaces/tabs/CR allowed).
std::optional<double> parse_double(std::string_view text);

}  // namespace llmbi

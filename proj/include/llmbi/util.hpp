#pragma once

#include <string>
#include <string_view>

namespace llmbi {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// e.g. "2025-01-31T12:00:00Z"
std::string utc_now_iso8601();

}  // namespace llmbi

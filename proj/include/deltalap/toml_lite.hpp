#pragma once

#include <string>

#include "json.hpp"

namespace deltalap {

// Parser for the TOML subset used by experiment configs: tables, dotted keys,
// strings, numbers, booleans, arrays and inline tables. Dates are not supported.
// Throws ConfigError with the line number on malformed input.
nlohmann::json parse_toml(const std::string& text);

}  // namespace deltalap

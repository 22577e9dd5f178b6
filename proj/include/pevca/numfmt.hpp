#pragma once

#include <string>

namespace pevca {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Strict full-string parse; throws std::runtime_error on garbage.
double parse_double(const std::string& text);

} // namespace pevca

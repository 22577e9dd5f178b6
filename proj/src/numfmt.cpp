#include "pevca/numfmt.hpp"

#include <array>
#include <charconv>
#include <stdexcept>
#include <system_error>

namespace pevca {

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::runtime_error("parse_double: invalid number '" + text + "'");
    return value;
}

} // namespace pevca

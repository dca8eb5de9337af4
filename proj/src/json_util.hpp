#ifndef BSBO_SRC_JSON_UTIL_HPP
#define BSBO_SRC_JSON_UTIL_HPP

#include <cstdio>
#include <string>

#include "json.hpp"

namespace bsbo::detail {

using nlohmann::json;

/// Shortest exact decimal form used everywhere a double lands in a CSV.
inline std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

} // namespace bsbo::detail

#endif // BSBO_SRC_JSON_UTIL_HPP

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dse {

std::string_view trim(std::string_view s) noexcept;
std::string to_lower(std::string_view s);

/// Case-fold and trim; the normal form for categorical values.
std::string fold_value(std::string_view s);

/// Lower-cased ASCII alphanumeric runs; everything else separates tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Strict decimal parse of a whole (trimmed) cell; rejects nan/inf.
std::optional<double> parse_number(std::string_view s);

/// Shortest round-trip decimal representation ("3" for 3.0).
std::string format_number(double v);

}  // namespace dse

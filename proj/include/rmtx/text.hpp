#pragma once

#include <string>

namespace rmtx {

/// Shortest round-trip decimal representation, '.' separator, locale independent.
[[nodiscard]] std::string format_double(double v);

}  // namespace rmtx

#pragma once

#include <string>

namespace spherimax::detail {

/// Decimal rendering with 12 significant digits (printf %.12g), the fixed
/// numeric format of every CSV and JSON artifact.
std::string sig12(double v);

}  // namespace spherimax::detail

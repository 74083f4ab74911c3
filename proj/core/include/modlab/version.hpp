#pragma once

#include <string_view>

namespace modlab {

// Bumped whenever a verdict or a certificate format can change.
inline constexpr std::string_view engine_version = "modlab 0.1.0";

}  // namespace modlab

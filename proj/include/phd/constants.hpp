#pragma once

namespace phd {

// speed of light in atomic units
inline constexpr double kSpeedOfLight = 137.036;

}  // namespace phd

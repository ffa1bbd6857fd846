#pragma once

#include <numbers>

namespace oammag {

inline constexpr double pi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * (pi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / pi); }

} // namespace oammag

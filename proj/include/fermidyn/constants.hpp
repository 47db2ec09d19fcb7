#pragma once

namespace fermidyn {

// CODATA-2014 value used by most integral packages.
inline constexpr double kAngstromToBohr = 1.0 / 0.52917721067;

inline constexpr double kPi = 3.14159265358979323846;

} // namespace fermidyn

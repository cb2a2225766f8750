#pragma once

#include <cstdint>

namespace edcafair {

/// Virtual time in integer microseconds.
using SimTime = std::int64_t;

inline constexpr SimTime kMicrosPerMilli = 1000;
inline constexpr SimTime kMicrosPerSecond = 1000000;

constexpr SimTime seconds(double s) { return static_cast<SimTime>(s * 1e6 + (s >= 0 ? 0.5 : -0.5)); }
constexpr SimTime millis(double ms) { return static_cast<SimTime>(ms * 1e3 + (ms >= 0 ? 0.5 : -0.5)); }
constexpr double to_seconds(SimTime t) { return static_cast<double>(t) / 1e6; }

}  // namespace edcafair

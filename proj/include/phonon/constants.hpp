#pragma once

#include <numbers>

namespace phonon {

/// CODATA 2018 values, SI units.
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kSpeedOfLight = 299792458.0;             // m/s
inline constexpr double kReducedPlanck = 1.054571817e-34;        // J s

inline constexpr double kPi = std::numbers::pi;

}  // namespace phonon

#pragma once

namespace rflow {

// Barrier F: smallest M in {50, 100, 200} for which the verification passes
// at r = 0.01. Re-run with `rflow verify-barrier f --r 0.01 --calibrate`.
inline constexpr double kCalibratedM = 50.0;

// Barrier speed constant c0 is taken as the observed minimum, capped below 1.
inline constexpr double kC0Cap = 0.99;

// Reference resolution of the thin dumbbell experiment (r = 0.01).
inline constexpr double kThinDumbbellSpacing = 4e-5;

}  // namespace rflow

#pragma once

// Thresholds fixed once by offline oracles and frozen here.

namespace beltrami::calibration {

/// Chaos threshold for lambda_max at ABC(1, 0.5, 0.1): half the median of the
/// positive estimates over separatrix_seed(0..19), T = 1e5, renorm 1,
/// tol 1e-9. Produced by tools/calibrate_lyapunov; log in
/// docs/lyapunov_calibration.txt.
inline constexpr double lyapunov_theta = 0.023223;

/// Lower bounds for min |v| (grid refinement oracle, see
/// docs/min_norm_refinement.txt).
inline constexpr double min_norm_abc_c0 = 0.1;    // ABC(1, 0.5, 0)
inline constexpr double min_norm_abc_c01 = 0.05;  // ABC(1, 0.5, 0.1)

/// Standard near-separatrix seed used for the section occupancy comparison
/// (C = 0 orbit from it crosses x3 = pi/2).
inline constexpr unsigned occupancy_seed = 1;

}  // namespace beltrami::calibration

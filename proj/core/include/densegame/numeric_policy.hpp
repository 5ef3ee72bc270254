#pragma once

#include <cstddef>

namespace densegame {

// Tolerances shared by every module. Pass a modified copy to override per call.
struct NumericPolicy {
  double hermiticity = 1e-10;  // max |M - M^dagger| entry
  double psd_floor = -1e-10;   // smallest admissible eigenvalue
  double trace = 1e-12;        // |Tr rho - 1| and probability sums
  double equality = 1e-12;
  double imaginary = 1e-10;    // discarded imaginary residue of a payoff
  double commutator = 1e-9;    // max |[A, B]| entry for "commuting"
  double diagonal = 1e-10;     // max off-diagonal magnitude for "diagonal"
};

inline constexpr NumericPolicy kDefaultPolicy{};

inline constexpr std::size_t kDefaultMaxJointDim = 4096;

// Joint-space dimension cap; DENSEGAME_MAX_DIM overrides the default.
std::size_t max_joint_dim();

}  // namespace densegame

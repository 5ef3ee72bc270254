#pragma once

// Nash equilibria in the density-matrix representation: the gain-based
// fixed-point map, equilibrium certificates, a brute-force oracle for small
// classical games, and the two solvable quantum special cases (commuting
// payoff operators, shared top eigenvector).

#include <cstddef>
#include <optional>
#include <vector>

#include "densegame/game_model.hpp"

namespace densegame {

// A state on the full joint space, not necessarily a product.
using JointState = DensityMatrix;

struct NashCertificate {
  DensityProfile profile;
  double epsilon = 0.0;
  std::vector<double> per_player_gain;  // best unilateral improvement
  std::vector<double> payoffs;          // E^i at the profile

  double max_gain() const;
  bool valid() const { return max_gain() <= epsilon; }
};

struct JointCertificate {
  JointState state;
  double epsilon = 0.0;
  std::vector<double> per_player_gain;
  std::vector<double> payoffs;

  double max_gain() const;
  bool valid() const { return max_gain() <= epsilon; }
};

struct FixedPointOptions {
  double tol = 1e-10;               // L1 distance between successive profiles
  std::size_t max_iter = 100000;
  double gain_tol = 1e-8;           // max_i Tr(Delta E^i) required at a fixed point
  bool polish = true;               // periodically test the support-snapped iterate
  std::size_t polish_interval = 64;
  double polish_floor = 1e-3;       // probabilities below this are snapped to zero
};

struct FixedPointReport {
  DensityProfile final_profile;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
  double delta_E_norm = 0.0;  // max_i Tr(Delta E^i) at final_profile
  bool polished = false;      // final_profile came from a snapped iterate
};

// Elementwise max(0, H_R - E) on the diagonal. Non-diagonal input is rejected.
ComplexMatrix delta_E(const ComplexMatrix& h_reduced, double payoff,
                      const NumericPolicy& policy = kDefaultPolicy);

// One application of the gain map to every player simultaneously.
// Requires diagonal payoff operators and a diagonal profile.
DensityProfile nash_map(const AbstractGame& game, const DensityProfile& rho,
                        const NumericPolicy& policy = kDefaultPolicy);

// Iterates nash_map. Converged means the last step moved less than tol AND
// the certified profile has max_i Tr(Delta E^i) <= gain_tol; anything else
// is reported as non-convergence.
FixedPointReport iterate_nash_map(const AbstractGame& game, const DensityProfile& rho0,
                                  const FixedPointOptions& options = {},
                                  const NumericPolicy& policy = kDefaultPolicy);

// Gain of player i is lambda_max(H^i_R) - E^i: the best pure deviation. For
// diagonal H^i_R that is the best pure strategy.
NashCertificate verify_ne(const AbstractGame& game, const DensityProfile& rho, double eps,
                          const NumericPolicy& policy = kDefaultPolicy);

// Deviations replace player i's part of the joint state: Tr^i(rho_S) (x) sigma.
JointCertificate verify_gne(const AbstractGame& game, const JointState& rho_s, double eps,
                            const NumericPolicy& policy = kDefaultPolicy);

// Projector onto a common eigenvector attaining every operator's top
// eigenvalue, if one exists within tol.
std::optional<JointState> common_max_eigenvector(const AbstractGame& game, double tol = 1e-9);

// Equilibrium of a game whose payoff operators pairwise commute. Returns
// nullopt when some commutator exceeds tol. Throws DiagonalizationError when
// the operators commute but admit no common eigenbasis made of local
// (per-player) bases. The certificate is produced by verify_ne in the
// original basis at epsilon 1e-8.
std::optional<NashCertificate> qne_commuting(const AbstractGame& game, double tol = 1e-9,
                                             const FixedPointOptions& options = {},
                                             const NumericPolicy& policy = kDefaultPolicy);

// Local bases W_i with (W_1 (x) ... (x) W_N)^dagger H^k (...) diagonal for
// every k; the building block of qne_commuting.
std::vector<ComplexMatrix> local_common_bases(const AbstractGame& game,
                                              const NumericPolicy& policy = kDefaultPolicy);

struct OracleOptions {
  std::size_t resolution = 20;        // simplex grid denominator (N != 2)
  double accept = 1e-9;               // support enumeration acceptance gain
  std::size_t max_results = 64;       // grid search output cap
  std::size_t max_grid_points = 5'000'000;
};

// Brute-force equilibria of a small classical game (N <= 3, L_i <= 4).
// Two players: support enumeration over every pair of supports, results
// de-duplicated. Otherwise: grid search over the product of simplex grids
// with the given resolution, returning local minima of the max gain that are
// below the discretization bound. Sorted by support, then probabilities.
std::vector<NashCertificate> brute_force_ne(const ClassicalGame& game,
                                            const OracleOptions& options = {});
std::vector<NashCertificate> brute_force_ne(const ClassicalGame& game, std::size_t resolution);

}  // namespace densegame

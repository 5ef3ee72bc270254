#pragma once

// Classical payoff tensors, their diagonal lift to payoff operators, and the
// payoff evaluation paths (multilinear expectation, trace contraction,
// reduced payoff matrices).

#include <cstddef>
#include <span>
#include <vector>

#include "densegame/tensor_core.hpp"

namespace densegame {

// N-player normal-form game. payoffs[i] is player i's tensor flattened
// row-major over the shape (player 0 slowest).
class ClassicalGame {
 public:
  ClassicalGame(SpaceShape shape, std::vector<std::vector<double>> payoffs);

  std::size_t players() const noexcept { return shape_.players(); }
  const SpaceShape& shape() const noexcept { return shape_; }
  std::span<const double> payoffs(std::size_t player) const;
  double payoff(std::size_t player, std::span<const std::size_t> pure_profile) const;

  friend bool operator==(const ClassicalGame&, const ClassicalGame&) = default;

 private:
  SpaceShape shape_;
  std::vector<std::vector<double>> payoffs_;
};

// Game given by one Hermitian payoff operator per player on the joint space.
class AbstractGame {
 public:
  AbstractGame(SpaceShape shape, std::vector<ComplexMatrix> payoff_operators,
               const NumericPolicy& policy = kDefaultPolicy);

  std::size_t players() const noexcept { return shape_.players(); }
  const SpaceShape& shape() const noexcept { return shape_; }
  const ComplexMatrix& payoff_operator(std::size_t player) const;
  const std::vector<ComplexMatrix>& payoff_operators() const noexcept { return ops_; }

  // Exactly zero off-diagonal part (true for every diagonal lift).
  bool operator_is_diagonal(std::size_t player) const;
  bool is_diagonal() const;

 private:
  SpaceShape shape_;
  std::vector<ComplexMatrix> ops_;
  std::vector<bool> diagonal_;
};

// One probability vector per player.
class MixedProfile {
 public:
  explicit MixedProfile(std::vector<std::vector<double>> probabilities,
                        const NumericPolicy& policy = kDefaultPolicy);

  static MixedProfile uniform(const SpaceShape& shape);
  static MixedProfile pure(const SpaceShape& shape, std::span<const std::size_t> choice);

  std::size_t players() const noexcept { return p_.size(); }
  std::span<const double> operator[](std::size_t player) const { return p_.at(player); }
  const std::vector<std::vector<double>>& data() const noexcept { return p_; }

 private:
  std::vector<std::vector<double>> p_;
};

// One density matrix per player; the joint state is their tensor product.
class DensityProfile {
 public:
  explicit DensityProfile(std::vector<DensityMatrix> factors);

  static DensityProfile uniform(const SpaceShape& shape);

  std::size_t players() const noexcept { return factors_.size(); }
  const DensityMatrix& operator[](std::size_t player) const { return factors_.at(player); }
  const std::vector<DensityMatrix>& factors() const noexcept { return factors_; }
  void set(std::size_t player, DensityMatrix rho);

  std::vector<std::size_t> dims() const;
  ComplexMatrix joint() const;
  bool is_diagonal(double tol) const;

 private:
  std::vector<DensityMatrix> factors_;
};

AbstractGame build_H_from_G(const ClassicalGame& game);

// Inverse of build_H_from_G for games whose operators are diagonal.
ClassicalGame classical_from_diagonal(const AbstractGame& game,
                                      const NumericPolicy& policy = kDefaultPolicy);

double payoff_classical(const ClassicalGame& game, const MixedProfile& profile,
                        std::size_t player);

// Tr(rho^S H^i) with rho^S formed explicitly as the tensor product.
double payoff_trace(const AbstractGame& game, const DensityProfile& rho, std::size_t player,
                    const NumericPolicy& policy = kDefaultPolicy);

// Tr_{-i}((prod_{j != i} rho^j) H^i), contracted without forming rho^S.
ComplexMatrix reduced_payoff(const AbstractGame& game, const DensityProfile& rho,
                             std::size_t player);

// Tr_{-i}((R (x) I_i) H) for an arbitrary operator R on the complement of
// `player` (indexed as shape.without(player)).
ComplexMatrix contract_complement(const ComplexMatrix& h, const SpaceShape& shape,
                                  std::size_t player, const ComplexMatrix& rest);

double payoff_reduced(const DensityMatrix& rho_i, const ComplexMatrix& h_reduced,
                      const NumericPolicy& policy = kDefaultPolicy);

// Tr((F_1 (x) ... (x) F_N) H) for unnormalized factors; no validation of the
// factors beyond dimensions.
Complex trace_against_product(const ComplexMatrix& h, std::span<const ComplexMatrix> factors);

// Real part of a payoff trace; throws NotHermitianError when the imaginary
// residue exceeds policy.imaginary * max(1, |z|).
double real_payoff(Complex z, const NumericPolicy& policy, const char* what);

DensityProfile mixed_to_density(const MixedProfile& profile);
MixedProfile density_to_mixed(const DensityProfile& profile);
MixedProfile wavefunction_to_mixed(std::span<const ComplexVector> amplitudes,
                                   const NumericPolicy& policy = kDefaultPolicy);
std::vector<double> wavefunction_to_mixed(const ComplexVector& amplitudes,
                                          const NumericPolicy& policy = kDefaultPolicy);

}  // namespace densegame

#pragma once

// Operator-level quantum games: players act on a shared quantum object with
// operators, a joint rule combines them, and payoff scale matrices value the
// end state. build_abstract compiles such a game into payoff operators over
// the players' operator spaces.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "densegame/game_model.hpp"

namespace densegame {

// Tr(U^dagger V).
Complex operator_inner(const ComplexMatrix& u, const ComplexMatrix& v);

// Orthonormal (under operator_inner) family of Q x Q operators spanning a
// player's strategy subspace.
class OperatorBasis {
 public:
  // Throws ValidationError when the elements are not orthonormal within 1e-12.
  OperatorBasis(std::size_t q, std::vector<ComplexMatrix> elements);

  std::size_t object_dim() const noexcept { return q_; }
  std::size_t size() const noexcept { return elements_.size(); }
  const ComplexMatrix& operator[](std::size_t k) const { return elements_.at(k); }
  const std::vector<ComplexMatrix>& elements() const noexcept { return elements_; }

  // Coefficients c_k = (B_k, U); exact for U inside the span.
  ComplexVector expand(const ComplexMatrix& u) const;
  ComplexMatrix assemble(const ComplexVector& coefficients) const;

  friend bool operator==(const OperatorBasis&, const OperatorBasis&) = default;

 private:
  std::size_t q_ = 0;
  std::vector<ComplexMatrix> elements_;
};

// |mu><nu| at index mu * q + nu.
OperatorBasis full_operator_basis(std::size_t q);

// Largest |(B_j, B_k) - delta_jk| over all pairs.
double orthonormality_defect(std::span<const ComplexMatrix> elements);

// Multilinear map combining the players' operators into one operator on the
// object.
class JointRule {
 public:
  enum class Kind { kOrderedProduct, kDirectProduct, kTable, kCustom };
  using Map = std::function<ComplexMatrix(std::span<const ComplexMatrix>)>;

  // U^N ... U^2 U^1: player 1 acts first.
  static JointRule ordered_product();
  // U^1 (x) ... (x) U^N on a composite object.
  static JointRule direct_product();
  // Multilinear extension of values on basis tuples. entries[S] is the image
  // of (B^1_{s_1}, ..., B^N_{s_N}) with S row-major over the basis sizes.
  static JointRule table(std::vector<OperatorBasis> bases, std::vector<ComplexMatrix> entries);
  // Arbitrary map; linearity is the caller's responsibility (see linearity_defect).
  static JointRule custom(Map map, std::string name);

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<OperatorBasis>& table_bases() const noexcept { return bases_; }
  const std::vector<ComplexMatrix>& table_entries() const noexcept { return entries_; }

  ComplexMatrix apply(std::span<const ComplexMatrix> ops) const;

 private:
  JointRule() = default;

  Kind kind_ = Kind::kOrderedProduct;
  std::string name_;
  std::vector<OperatorBasis> bases_;
  std::vector<ComplexMatrix> entries_;
  Map map_;
};

// Max over trials and players of |L(.., a U, ..) - a L(.., U, ..)| for random
// operators U and random complex scalars a.
double linearity_defect(const JointRule& rule, std::span<const std::size_t> operator_dims,
                        std::size_t trials, std::uint64_t seed);

struct QuantumObject {
  std::size_t dim = 0;
  DensityMatrix rho0 = DensityMatrix::maximally_mixed(1);
};

class OperatorGame {
 public:
  // Every player's basis must act on the full object space, except under the
  // direct-product rule where the object is the tensor product of the
  // players' spaces. Payoff scales must be Hermitian within 1e-12.
  OperatorGame(QuantumObject object, std::vector<OperatorBasis> bases, JointRule rule,
               std::vector<ComplexMatrix> payoff_scales);

  std::size_t players() const noexcept { return bases_.size(); }
  const QuantumObject& object() const noexcept { return object_; }
  const OperatorBasis& basis(std::size_t player) const { return bases_.at(player); }
  const std::vector<OperatorBasis>& bases() const noexcept { return bases_; }
  const JointRule& rule() const noexcept { return rule_; }
  const ComplexMatrix& payoff_scale(std::size_t player) const { return scales_.at(player); }
  const std::vector<ComplexMatrix>& payoff_scales() const noexcept { return scales_; }

  // Strategy space shape: one digit per player ranging over its basis.
  SpaceShape strategy_shape() const;

 private:
  QuantumObject object_;
  std::vector<OperatorBasis> bases_;
  JointRule rule_;
  std::vector<ComplexMatrix> scales_;
};

// L(ops) rho0 L(ops)^dagger. The trace drops below one for non-unitary
// strategies; that is reported, not rejected.
ComplexMatrix end_state(const JointRule& rule, std::span<const ComplexMatrix> ops,
                        const ComplexMatrix& rho0);

// Tr(P rho_q).
double payoff_operator_level(const ComplexMatrix& p, const ComplexMatrix& rho_q,
                             const NumericPolicy& policy = kDefaultPolicy);

// Payoff of every player when each plays the given operator.
std::vector<double> operator_level_payoffs(const OperatorGame& game,
                                           std::span<const ComplexMatrix> ops,
                                           const NumericPolicy& policy = kDefaultPolicy);

// <Phi|H^i|Psi> = Tr(P^i L(Psi) rho0 L(Phi)^dagger), so that a player whose
// operator has coefficients c holds the operator-space state c c^dagger.
AbstractGame build_abstract(const OperatorGame& game,
                            const NumericPolicy& policy = kDefaultPolicy);

// Tr(rho^S H^i) with rho^i = c_i c_i^dagger. Coefficients are taken as given;
// a unitary on a Q-dim object has squared norm Q.
double payoff_abstract(const AbstractGame& game, std::span<const ComplexVector> coefficients,
                       std::size_t player, const NumericPolicy& policy = kDefaultPolicy);

// Tr((rho^1 (x) ... (x) rho^N) H^i) for operator-space density matrices.
double payoff_abstract(const AbstractGame& game, std::span<const ComplexMatrix> densities,
                       std::size_t player, const NumericPolicy& policy = kDefaultPolicy);

// Max |operator-level payoff - abstract payoff| over `samples` random
// strategy tuples and all players. Strategies are random unit coefficient
// vectors, or Haar-random unitaries when unitary_only is set.
double verify_equivalence(const OperatorGame& og, const AbstractGame& game, std::size_t samples,
                          std::uint64_t seed, bool unitary_only = false,
                          const NumericPolicy& policy = kDefaultPolicy);

// xi I + i (x sigma_x + y sigma_y + z sigma_z); requires unit norm of
// (xi, x, y, z) within 1e-10.
ComplexMatrix unitary_2x2(double xi, double x, double y, double z);

enum class GameClass { kDiagonal, kCoDiagonalizable, kGeneral };

struct Classification {
  GameClass kind = GameClass::kGeneral;
  bool entangled = false;  // caller-supplied: joint states need not be products

  // "diagonal", "co-diagonalizable" or "general", plus " entangled" when flagged.
  std::string label() const;
};

// diagonal: every off-diagonal entry <= 1e-10; co-diagonalizable: every
// pairwise commutator <= 1e-9; general otherwise.
Classification classify(const AbstractGame& game, bool entangled = false);

std::string to_string(GameClass kind);

}  // namespace densegame

#pragma once

// Dense complex linear algebra over multi-party state spaces: tensor
// products, partial traces, Hermitian exponentials and simultaneous
// diagonalization of commuting Hermitian families.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "densegame/errors.hpp"
#include "densegame/numeric_policy.hpp"

namespace densegame {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Ordered per-player space dimensions of a joint (tensor product) space.
// Joint indices are row-major over players: player 0 is the most
// significant digit.
class SpaceShape {
 public:
  SpaceShape() = default;
  explicit SpaceShape(std::vector<std::size_t> dims);

  std::size_t players() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t player) const;
  std::size_t joint_dim() const noexcept { return joint_; }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }

  // Distance in the joint index between consecutive values of `player`'s digit.
  std::size_t stride(std::size_t player) const;

  std::vector<std::size_t> unflatten(std::size_t joint_index) const;
  std::size_t flatten(std::span<const std::size_t> digits) const;

  // Shape with `player` removed; dims {1} when only one player remains.
  SpaceShape without(std::size_t player) const;

  // Joint indices whose `player` digit is zero, in increasing order. The
  // k-th entry corresponds to complement index k of without(player).
  std::vector<std::size_t> complement_offsets(std::size_t player) const;

  friend bool operator==(const SpaceShape&, const SpaceShape&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::size_t joint_ = 1;
};

// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(ComplexMatrix m,
                                   const NumericPolicy& policy = kDefaultPolicy);
  static DensityMatrix diagonal(std::span<const double> probabilities,
                                const NumericPolicy& policy = kDefaultPolicy);
  static DensityMatrix pure(const ComplexVector& amplitudes,
                            const NumericPolicy& policy = kDefaultPolicy);
  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::vector<double> probabilities() const;  // real diagonal

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

struct HermitianEigen {
  RealVector values;     // ascending
  ComplexMatrix vectors;  // columns
};

double max_abs(const ComplexMatrix& m);
double hermiticity_defect(const ComplexMatrix& m);
double off_diagonal_max(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol);
bool is_diagonal(const ComplexMatrix& m, double tol);
double l1_distance(const ComplexMatrix& a, const ComplexMatrix& b);

// Throws NotHermitianError naming `what` when the defect exceeds tol.
void require_hermitian(const ComplexMatrix& m, double tol, const char* what);
void require_finite(const ComplexMatrix& m, const char* what);

HermitianEigen hermitian_eigen(const ComplexMatrix& h);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron_all(std::span<const ComplexMatrix> factors);

// Tr_{-i}: keeps only `player`'s factor.
ComplexMatrix partial_trace_keep(const ComplexMatrix& m, const SpaceShape& shape,
                                 std::size_t player);

// Tr^i: traces out `player`'s factor, result lives on shape.without(player).
ComplexMatrix trace_in(const ComplexMatrix& m, const SpaceShape& shape,
                       std::size_t player);

// Inverse layout of trace_in: rest (on shape.without(player)) tensored with
// `local` re-inserted at `player`'s slot.
ComplexMatrix embed_at(const ComplexMatrix& rest, const ComplexMatrix& local,
                       const SpaceShape& shape, std::size_t player);

// e^{beta H} for Hermitian H.
ComplexMatrix herm_expm(const ComplexMatrix& h, double beta,
                        const NumericPolicy& policy = kDefaultPolicy);

// e^{beta H} / Tr e^{beta H}, computed with the top eigenvalue subtracted so
// large beta cannot overflow. beta may be +infinity (uniform over the top
// eigenspace).
ComplexMatrix herm_expm_normalized(const ComplexMatrix& h, double beta,
                                   const NumericPolicy& policy = kDefaultPolicy);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

// Unitary V with V^dagger H_k V diagonal for every k. Throws
// NonCommutingError when some pair fails to commute within
// policy.commutator and DiagonalizationError when the residual of the
// produced basis exceeds the same tolerance.
ComplexMatrix simultaneous_diagonalization(std::span<const ComplexMatrix> family,
                                           const NumericPolicy& policy = kDefaultPolicy);

// Largest off-diagonal magnitude of V^dagger H_k V over the family.
double diagonalization_residual(std::span<const ComplexMatrix> family,
                                const ComplexMatrix& basis);

}  // namespace densegame

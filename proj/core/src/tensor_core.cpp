#include "densegame/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace densegame {

std::size_t max_joint_dim() {
  if (const char* env = std::getenv("DENSEGAME_MAX_DIM")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultMaxJointDim;
}

// ---------------------------------------------------------------------------
// SpaceShape

SpaceShape::SpaceShape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DimensionError("space shape needs at least one factor");
  const std::size_t cap = max_joint_dim();
  joint_ = 1;
  for (std::size_t d : dims_) {
    if (d == 0) throw DimensionError("space shape factor of dimension 0");
    if (joint_ > cap / d) {
      throw SizeLimitError("joint dimension exceeds cap of " + std::to_string(cap) +
                           " (set DENSEGAME_MAX_DIM to raise it)");
    }
    joint_ *= d;
  }
}

std::size_t SpaceShape::dim(std::size_t player) const {
  if (player >= dims_.size()) throw DimensionError("player index out of range");
  return dims_[player];
}

std::size_t SpaceShape::stride(std::size_t player) const {
  if (player >= dims_.size()) throw DimensionError("player index out of range");
  std::size_t s = 1;
  for (std::size_t k = player + 1; k < dims_.size(); ++k) s *= dims_[k];
  return s;
}

std::vector<std::size_t> SpaceShape::unflatten(std::size_t joint_index) const {
  std::vector<std::size_t> digits(dims_.size());
  for (std::size_t k = dims_.size(); k-- > 0;) {
    digits[k] = joint_index % dims_[k];
    joint_index /= dims_[k];
  }
  return digits;
}

std::size_t SpaceShape::flatten(std::span<const std::size_t> digits) const {
  if (digits.size() != dims_.size()) throw DimensionError("digit count mismatch");
  std::size_t index = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (digits[k] >= dims_[k]) throw DimensionError("digit out of range");
    index = index * dims_[k] + digits[k];
  }
  return index;
}

SpaceShape SpaceShape::without(std::size_t player) const {
  if (player >= dims_.size()) throw DimensionError("player index out of range");
  std::vector<std::size_t> rest;
  rest.reserve(dims_.size());
  for (std::size_t k = 0; k < dims_.size(); ++k)
    if (k != player) rest.push_back(dims_[k]);
  if (rest.empty()) rest.push_back(1);
  return SpaceShape(std::move(rest));
}

std::vector<std::size_t> SpaceShape::complement_offsets(std::size_t player) const {
  const std::size_t s = stride(player);
  const std::size_t block = s * dims_[player];
  std::vector<std::size_t> out;
  out.reserve(joint_ / dims_[player]);
  for (std::size_t hi = 0; hi < joint_; hi += block)
    for (std::size_t lo = 0; lo < s; ++lo) out.push_back(hi + lo);
  return out;
}

// ---------------------------------------------------------------------------
// Matrix predicates

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(m - m.adjoint());
}

double off_diagonal_max(const ComplexMatrix& m) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (r != c) worst = std::max(worst, std::abs(m(r, c)));
  return worst;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return hermiticity_defect(m) <= tol;
}

bool is_diagonal(const ComplexMatrix& m, double tol) {
  return m.rows() == m.cols() && off_diagonal_max(m) <= tol;
}

double l1_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("l1_distance: shape mismatch");
  return (a - b).cwiseAbs().sum();
}

void require_finite(const ComplexMatrix& m, const char* what) {
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const Complex z = m.data()[k];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw ValidationError(std::string(what) + ": non-finite entry");
  }
}

void require_hermitian(const ComplexMatrix& m, double tol, const char* what) {
  if (m.rows() != m.cols()) throw DimensionError(std::string(what) + ": not square");
  require_finite(m, what);
  const double defect = hermiticity_defect(m);
  if (defect > tol) {
    throw NotHermitianError(std::string(what) + ": not Hermitian (defect " +
                            std::to_string(defect) + ")");
  }
}

HermitianEigen hermitian_eigen(const ComplexMatrix& h) {
  // Symmetrize so the solver sees an exactly Hermitian input.
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw DiagonalizationError("Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix m, const NumericPolicy& policy) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw DimensionError("density matrix must be square and non-empty");
  require_hermitian(m, policy.hermiticity, "density matrix");
  const Complex tr = m.trace();
  if (std::abs(tr.real() - 1.0) > policy.trace || std::abs(tr.imag()) > policy.trace)
    throw ValidationError("density matrix trace is not 1");
  if (is_diagonal(m, 0.0)) {
    if (m.diagonal().real().minCoeff() < policy.psd_floor)
      throw ValidationError("density matrix has a negative eigenvalue");
  } else if (hermitian_eigen(m).values.minCoeff() < policy.psd_floor) {
    throw ValidationError("density matrix has a negative eigenvalue");
  }
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> probabilities,
                                      const NumericPolicy& policy) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(probabilities.size()),
                                        static_cast<Eigen::Index>(probabilities.size()));
  for (std::size_t k = 0; k < probabilities.size(); ++k)
    m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = probabilities[k];
  return from_matrix(std::move(m), policy);
}

DensityMatrix DensityMatrix::pure(const ComplexVector& amplitudes,
                                  const NumericPolicy& policy) {
  return from_matrix(amplitudes * amplitudes.adjoint(), policy);
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  if (dim == 0) throw DimensionError("density matrix must be non-empty");
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityMatrix(ComplexMatrix::Identity(n, n) / static_cast<double>(dim));
}

std::vector<double> DensityMatrix::probabilities() const {
  std::vector<double> p(dim());
  for (std::size_t k = 0; k < p.size(); ++k)
    p[k] = m_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real();
  return p;
}

// ---------------------------------------------------------------------------
// Tensor products and partial traces

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix kron_all(std::span<const ComplexMatrix> factors) {
  if (factors.empty()) return ComplexMatrix::Identity(1, 1);
  ComplexMatrix out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

namespace {

void require_joint_square(const ComplexMatrix& m, const SpaceShape& shape,
                          std::size_t player, const char* what) {
  const auto n = static_cast<Eigen::Index>(shape.joint_dim());
  if (m.rows() != n || m.cols() != n)
    throw DimensionError(std::string(what) + ": matrix does not match joint dimension");
  if (player >= shape.players())
    throw DimensionError(std::string(what) + ": player index out of range");
}

}  // namespace

ComplexMatrix partial_trace_keep(const ComplexMatrix& m, const SpaceShape& shape,
                                 std::size_t player) {
  require_joint_square(m, shape, player, "partial_trace_keep");
  const auto d = static_cast<Eigen::Index>(shape.dim(player));
  const auto s = static_cast<Eigen::Index>(shape.stride(player));
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (std::size_t base : shape.complement_offsets(player)) {
    const auto b0 = static_cast<Eigen::Index>(base);
    for (Eigen::Index col = 0; col < d; ++col)
      for (Eigen::Index row = 0; row < d; ++row) out(row, col) += m(b0 + row * s, b0 + col * s);
  }
  return out;
}

ComplexMatrix trace_in(const ComplexMatrix& m, const SpaceShape& shape, std::size_t player) {
  require_joint_square(m, shape, player, "trace_in");
  const auto d = static_cast<Eigen::Index>(shape.dim(player));
  const auto s = static_cast<Eigen::Index>(shape.stride(player));
  const auto offsets = shape.complement_offsets(player);
  const auto n = static_cast<Eigen::Index>(offsets.size());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto oc = static_cast<Eigen::Index>(offsets[static_cast<std::size_t>(c)]);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto orow = static_cast<Eigen::Index>(offsets[static_cast<std::size_t>(r)]);
      Complex acc = 0.0;
      for (Eigen::Index a = 0; a < d; ++a) acc += m(orow + a * s, oc + a * s);
      out(r, c) = acc;
    }
  }
  return out;
}

ComplexMatrix embed_at(const ComplexMatrix& rest, const ComplexMatrix& local,
                       const SpaceShape& shape, std::size_t player) {
  if (player >= shape.players()) throw DimensionError("embed_at: player index out of range");
  const auto d = static_cast<Eigen::Index>(shape.dim(player));
  const auto s = static_cast<Eigen::Index>(shape.stride(player));
  const auto offsets = shape.complement_offsets(player);
  const auto n = static_cast<Eigen::Index>(offsets.size());
  if (rest.rows() != n || rest.cols() != n || local.rows() != d || local.cols() != d)
    throw DimensionError("embed_at: factor dimensions do not match shape");
  const auto joint = static_cast<Eigen::Index>(shape.joint_dim());
  ComplexMatrix out = ComplexMatrix::Zero(joint, joint);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto oc = static_cast<Eigen::Index>(offsets[static_cast<std::size_t>(c)]);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto orow = static_cast<Eigen::Index>(offsets[static_cast<std::size_t>(r)]);
      const Complex w = rest(r, c);
      if (w == Complex(0.0)) continue;
      for (Eigen::Index b = 0; b < d; ++b)
        for (Eigen::Index a = 0; a < d; ++a) out(orow + a * s, oc + b * s) = w * local(a, b);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exponentials

ComplexMatrix herm_expm(const ComplexMatrix& h, double beta, const NumericPolicy& policy) {
  require_hermitian(h, policy.hermiticity, "herm_expm");
  if (!std::isfinite(beta)) throw ValidationError("herm_expm: beta must be finite");
  const Eigen::Index n = h.rows();
  if (is_diagonal(h, 0.0)) {
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) out(k, k) = std::exp(beta * h(k, k).real());
    return out;
  }
  const HermitianEigen eig = hermitian_eigen(h);
  const RealVector w = (beta * eig.values.array()).exp().matrix();
  ComplexMatrix out = eig.vectors * w.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return 0.5 * (out + out.adjoint());
}

namespace {

// Weights proportional to exp(beta * (v - max v)), normalized to sum 1.
RealVector boltzmann_weights(const RealVector& values, double beta) {
  const Eigen::Index n = values.size();
  const double top = values.maxCoeff();
  RealVector w(n);
  if (std::isinf(beta) && beta > 0) {
    // Best-response limit: uniform over entries tied with the maximum.
    constexpr double kTie = 1e-12;
    for (Eigen::Index k = 0; k < n; ++k) w(k) = (top - values(k) <= kTie) ? 1.0 : 0.0;
  } else {
    for (Eigen::Index k = 0; k < n; ++k) w(k) = std::exp(beta * (values(k) - top));
  }
  return w / w.sum();
}

}  // namespace

ComplexMatrix herm_expm_normalized(const ComplexMatrix& h, double beta,
                                   const NumericPolicy& policy) {
  require_hermitian(h, policy.hermiticity, "herm_expm_normalized");
  if (std::isnan(beta) || beta < 0) throw ValidationError("beta must be >= 0");
  const Eigen::Index n = h.rows();
  if (is_diagonal(h, 0.0)) {
    const RealVector w = boltzmann_weights(h.diagonal().real(), beta);
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) out(k, k) = w(k);
    return out;
  }
  const HermitianEigen eig = hermitian_eigen(h);
  const RealVector w = boltzmann_weights(eig.values, beta);
  ComplexMatrix out = eig.vectors * w.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  out = 0.5 * (out + out.adjoint());
  return out / out.trace().real();
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw DimensionError("commutator: operands must be square with equal dimension");
  return a * b - b * a;
}

// ---------------------------------------------------------------------------
// Simultaneous diagonalization

namespace {

// Diagonalizes family[k] inside span(basis), then recurses into every
// cluster of (numerically) degenerate eigenvalues with the next operator.
ComplexMatrix refine_basis(std::span<const ComplexMatrix> family, const ComplexMatrix& basis,
                           std::size_t k, double cluster_tol) {
  if (k == family.size() || basis.cols() <= 1) return basis;
  const ComplexMatrix restricted = basis.adjoint() * family[k] * basis;
  const HermitianEigen eig = hermitian_eigen(restricted);
  ComplexMatrix rotated = basis * eig.vectors;

  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  const Eigen::Index n = eig.values.size();
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && eig.values(stop) - eig.values(stop - 1) <= cluster_tol * scale) ++stop;
    const Eigen::Index width = stop - start;
    if (width > 1) {
      rotated.middleCols(start, width) =
          refine_basis(family, rotated.middleCols(start, width), k + 1, cluster_tol);
    }
    start = stop;
  }
  return rotated;
}

}  // namespace

double diagonalization_residual(std::span<const ComplexMatrix> family,
                                const ComplexMatrix& basis) {
  double worst = 0.0;
  for (const ComplexMatrix& h : family)
    worst = std::max(worst, off_diagonal_max(basis.adjoint() * h * basis));
  return worst;
}

ComplexMatrix simultaneous_diagonalization(std::span<const ComplexMatrix> family,
                                           const NumericPolicy& policy) {
  if (family.empty()) throw DimensionError("simultaneous_diagonalization: empty family");
  const Eigen::Index n = family.front().rows();
  for (const ComplexMatrix& h : family) {
    if (h.rows() != n || h.cols() != n)
      throw DimensionError("simultaneous_diagonalization: dimension mismatch");
    require_hermitian(h, policy.hermiticity, "simultaneous_diagonalization");
  }
  for (std::size_t a = 0; a < family.size(); ++a) {
    for (std::size_t b = a + 1; b < family.size(); ++b) {
      const double c = max_abs(commutator(family[a], family[b]));
      if (c > policy.commutator) {
        throw NonCommutingError("operators " + std::to_string(a) + " and " +
                                std::to_string(b) + " do not commute (|[A,B]| = " +
                                std::to_string(c) + ")");
      }
    }
  }

  const ComplexMatrix identity = ComplexMatrix::Identity(n, n);
  double best_residual = std::numeric_limits<double>::infinity();
  for (double cluster_tol : {1e-10, 1e-8, 1e-6}) {
    ComplexMatrix v = refine_basis(family, identity, 0, cluster_tol);
    const double residual = diagonalization_residual(family, v);
    if (residual <= policy.commutator) return v;
    best_residual = std::min(best_residual, residual);
  }
  throw DiagonalizationError("no common eigenbasis within tolerance (best residual " +
                             std::to_string(best_residual) + ")");
}

}  // namespace densegame

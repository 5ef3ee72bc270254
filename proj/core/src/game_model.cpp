#include "densegame/game_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace densegame {

namespace {

std::string player_label(std::size_t player) { return "player " + std::to_string(player + 1); }

void require_player(std::size_t player, std::size_t players) {
  if (player >= players) throw DimensionError("player index out of range");
}

void require_profile_matches(const SpaceShape& shape, const std::vector<std::size_t>& dims) {
  if (dims != shape.dims()) throw DimensionError("profile dimensions do not match the game");
}

// Local digit and complement index of every joint index for one player.
struct SplitIndex {
  std::vector<Eigen::Index> local;
  std::vector<Eigen::Index> rest;
};

SplitIndex split_indices(const SpaceShape& shape, std::size_t player) {
  const std::size_t d = shape.dim(player);
  const std::size_t s = shape.stride(player);
  SplitIndex out;
  out.local.resize(shape.joint_dim());
  out.rest.resize(shape.joint_dim());
  for (std::size_t idx = 0; idx < shape.joint_dim(); ++idx) {
    out.local[idx] = static_cast<Eigen::Index>((idx / s) % d);
    out.rest[idx] = static_cast<Eigen::Index>((idx / (s * d)) * s + idx % s);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// ClassicalGame

ClassicalGame::ClassicalGame(SpaceShape shape, std::vector<std::vector<double>> payoffs)
    : shape_(std::move(shape)), payoffs_(std::move(payoffs)) {
  if (payoffs_.size() != shape_.players())
    throw DimensionError("one payoff tensor per player required");
  for (std::size_t i = 0; i < payoffs_.size(); ++i) {
    if (payoffs_[i].size() != shape_.joint_dim())
      throw DimensionError(player_label(i) + " payoff tensor has wrong entry count");
    for (double v : payoffs_[i])
      if (!std::isfinite(v)) throw ValidationError(player_label(i) + " payoff is not finite");
  }
}

std::span<const double> ClassicalGame::payoffs(std::size_t player) const {
  require_player(player, players());
  return payoffs_[player];
}

double ClassicalGame::payoff(std::size_t player, std::span<const std::size_t> pure_profile) const {
  require_player(player, players());
  return payoffs_[player][shape_.flatten(pure_profile)];
}

// ---------------------------------------------------------------------------
// AbstractGame

AbstractGame::AbstractGame(SpaceShape shape, std::vector<ComplexMatrix> payoff_operators,
                           const NumericPolicy& policy)
    : shape_(std::move(shape)), ops_(std::move(payoff_operators)) {
  if (ops_.size() != shape_.players())
    throw DimensionError("one payoff operator per player required");
  const auto n = static_cast<Eigen::Index>(shape_.joint_dim());
  diagonal_.reserve(ops_.size());
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    if (ops_[i].rows() != n || ops_[i].cols() != n)
      throw DimensionError(player_label(i) + " payoff operator does not match joint dimension");
    const std::string what = player_label(i) + " payoff operator";
    require_hermitian(ops_[i], policy.hermiticity, what.c_str());
    diagonal_.push_back(densegame::is_diagonal(ops_[i], 0.0));
  }
}

const ComplexMatrix& AbstractGame::payoff_operator(std::size_t player) const {
  require_player(player, players());
  return ops_[player];
}

bool AbstractGame::operator_is_diagonal(std::size_t player) const {
  require_player(player, players());
  return diagonal_[player];
}

bool AbstractGame::is_diagonal() const {
  return std::all_of(diagonal_.begin(), diagonal_.end(), [](bool b) { return b; });
}

// ---------------------------------------------------------------------------
// Profiles

MixedProfile::MixedProfile(std::vector<std::vector<double>> probabilities,
                           const NumericPolicy& policy)
    : p_(std::move(probabilities)) {
  if (p_.empty()) throw DimensionError("profile needs at least one player");
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (p_[i].empty()) throw DimensionError(player_label(i) + " has no strategies");
    double sum = 0.0;
    for (double v : p_[i]) {
      if (!std::isfinite(v) || v < -policy.trace)
        throw ValidationError(player_label(i) + " probability is negative or not finite");
      sum += v;
    }
    if (std::abs(sum - 1.0) > policy.trace)
      throw ValidationError(player_label(i) + " probabilities do not sum to 1");
  }
}

MixedProfile MixedProfile::uniform(const SpaceShape& shape) {
  std::vector<std::vector<double>> p;
  for (std::size_t d : shape.dims()) p.emplace_back(d, 1.0 / static_cast<double>(d));
  return MixedProfile(std::move(p));
}

MixedProfile MixedProfile::pure(const SpaceShape& shape, std::span<const std::size_t> choice) {
  if (choice.size() != shape.players()) throw DimensionError("one choice per player required");
  std::vector<std::vector<double>> p;
  for (std::size_t i = 0; i < choice.size(); ++i) {
    if (choice[i] >= shape.dim(i)) throw DimensionError("pure strategy index out of range");
    std::vector<double> v(shape.dim(i), 0.0);
    v[choice[i]] = 1.0;
    p.push_back(std::move(v));
  }
  return MixedProfile(std::move(p));
}

DensityProfile::DensityProfile(std::vector<DensityMatrix> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw DimensionError("profile needs at least one player");
}

DensityProfile DensityProfile::uniform(const SpaceShape& shape) {
  std::vector<DensityMatrix> f;
  for (std::size_t d : shape.dims()) f.push_back(DensityMatrix::maximally_mixed(d));
  return DensityProfile(std::move(f));
}

void DensityProfile::set(std::size_t player, DensityMatrix rho) {
  require_player(player, players());
  if (rho.dim() != factors_[player].dim())
    throw DimensionError("replacement factor has a different dimension");
  factors_[player] = std::move(rho);
}

std::vector<std::size_t> DensityProfile::dims() const {
  std::vector<std::size_t> d;
  d.reserve(factors_.size());
  for (const auto& f : factors_) d.push_back(f.dim());
  return d;
}

ComplexMatrix DensityProfile::joint() const {
  std::vector<ComplexMatrix> m;
  m.reserve(factors_.size());
  for (const auto& f : factors_) m.push_back(f.matrix());
  return kron_all(m);
}

bool DensityProfile::is_diagonal(double tol) const {
  return std::all_of(factors_.begin(), factors_.end(),
                     [tol](const DensityMatrix& f) { return densegame::is_diagonal(f.matrix(), tol); });
}

// ---------------------------------------------------------------------------
// Lifts

AbstractGame build_H_from_G(const ClassicalGame& game) {
  const auto n = static_cast<Eigen::Index>(game.shape().joint_dim());
  std::vector<ComplexMatrix> ops;
  ops.reserve(game.players());
  for (std::size_t i = 0; i < game.players(); ++i) {
    ComplexMatrix h = ComplexMatrix::Zero(n, n);
    const auto g = game.payoffs(i);
    for (Eigen::Index s = 0; s < n; ++s) h(s, s) = g[static_cast<std::size_t>(s)];
    ops.push_back(std::move(h));
  }
  return AbstractGame(game.shape(), std::move(ops));
}

ClassicalGame classical_from_diagonal(const AbstractGame& game, const NumericPolicy& policy) {
  std::vector<std::vector<double>> g;
  for (std::size_t i = 0; i < game.players(); ++i) {
    const ComplexMatrix& h = game.payoff_operator(i);
    if (!is_diagonal(h, policy.diagonal))
      throw ValidationError(player_label(i) + " payoff operator is not diagonal");
    std::vector<double> v(static_cast<std::size_t>(h.rows()));
    for (Eigen::Index s = 0; s < h.rows(); ++s) v[static_cast<std::size_t>(s)] = h(s, s).real();
    g.push_back(std::move(v));
  }
  return ClassicalGame(game.shape(), std::move(g));
}

// ---------------------------------------------------------------------------
// Payoffs

double payoff_classical(const ClassicalGame& game, const MixedProfile& profile,
                        std::size_t player) {
  require_player(player, game.players());
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i < profile.players(); ++i) dims.push_back(profile[i].size());
  require_profile_matches(game.shape(), dims);

  const auto g = game.payoffs(player);
  const std::size_t n = game.players();
  std::vector<std::size_t> digits(n, 0);
  double total = 0.0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    double weight = 1.0;
    for (std::size_t j = 0; j < n; ++j) weight *= profile[j][digits[j]];
    total += weight * g[s];
    for (std::size_t j = n; j-- > 0;) {
      if (++digits[j] < dims[j]) break;
      digits[j] = 0;
    }
  }
  return total;
}

double real_payoff(Complex z, const NumericPolicy& policy, const char* what) {
  if (std::abs(z.imag()) > policy.imaginary * std::max(1.0, std::abs(z.real()))) {
    throw NotHermitianError(std::string(what) + ": imaginary payoff residue " +
                            std::to_string(z.imag()));
  }
  return z.real();
}

double payoff_trace(const AbstractGame& game, const DensityProfile& rho, std::size_t player,
                    const NumericPolicy& policy) {
  require_player(player, game.players());
  require_profile_matches(game.shape(), rho.dims());
  const ComplexMatrix joint = rho.joint();
  const Complex tr = joint.cwiseProduct(game.payoff_operator(player).transpose()).sum();
  return real_payoff(tr, policy, "payoff_trace");
}

ComplexMatrix contract_complement(const ComplexMatrix& h, const SpaceShape& shape,
                                  std::size_t player, const ComplexMatrix& rest) {
  require_player(player, shape.players());
  const auto n = static_cast<Eigen::Index>(shape.joint_dim());
  const auto d = static_cast<Eigen::Index>(shape.dim(player));
  const Eigen::Index m = n / d;
  if (h.rows() != n || h.cols() != n) throw DimensionError("operator does not match joint dimension");
  if (rest.rows() != m || rest.cols() != m)
    throw DimensionError("complement operator does not match complement dimension");

  const SplitIndex ix = split_indices(shape, player);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Complex v = h(r, c);
      if (v == Complex(0.0)) continue;
      const auto ru = static_cast<std::size_t>(r);
      out(ix.local[ru], ix.local[cu]) += v * rest(ix.rest[cu], ix.rest[ru]);
    }
  }
  return out;
}

ComplexMatrix reduced_payoff(const AbstractGame& game, const DensityProfile& rho,
                             std::size_t player) {
  require_player(player, game.players());
  require_profile_matches(game.shape(), rho.dims());
  const SpaceShape& shape = game.shape();
  const ComplexMatrix& h = game.payoff_operator(player);
  const auto d = static_cast<Eigen::Index>(shape.dim(player));

  if (game.operator_is_diagonal(player)) {
    // Only diagonal entries of the opponents' factors can contribute.
    const SplitIndex ix = split_indices(shape, player);
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    std::vector<std::size_t> digits(shape.players(), 0);
    for (std::size_t s = 0; s < shape.joint_dim(); ++s) {
      Complex weight = 1.0;
      for (std::size_t j = 0; j < shape.players(); ++j) {
        if (j == player) continue;
        const auto k = static_cast<Eigen::Index>(digits[j]);
        weight *= rho[j].matrix()(k, k);
      }
      const auto si = static_cast<Eigen::Index>(s);
      out(ix.local[s], ix.local[s]) += weight * h(si, si);
      for (std::size_t j = shape.players(); j-- > 0;) {
        if (++digits[j] < shape.dim(j)) break;
        digits[j] = 0;
      }
    }
    return out;
  }

  std::vector<ComplexMatrix> others;
  for (std::size_t j = 0; j < shape.players(); ++j)
    if (j != player) others.push_back(rho[j].matrix());
  return contract_complement(h, shape, player, kron_all(others));
}

double payoff_reduced(const DensityMatrix& rho_i, const ComplexMatrix& h_reduced,
                      const NumericPolicy& policy) {
  if (h_reduced.rows() != static_cast<Eigen::Index>(rho_i.dim()) ||
      h_reduced.cols() != h_reduced.rows())
    throw DimensionError("payoff_reduced: dimension mismatch");
  require_hermitian(h_reduced, policy.hermiticity, "reduced payoff matrix");
  const Complex tr = rho_i.matrix().cwiseProduct(h_reduced.transpose()).sum();
  return real_payoff(tr, policy, "payoff_reduced");
}

Complex trace_against_product(const ComplexMatrix& h, std::span<const ComplexMatrix> factors) {
  const ComplexMatrix joint = kron_all(factors);
  if (joint.rows() != h.rows() || joint.cols() != h.cols())
    throw DimensionError("factor dimensions do not match operator");
  return joint.cwiseProduct(h.transpose()).sum();
}

// ---------------------------------------------------------------------------
// Conversions

DensityProfile mixed_to_density(const MixedProfile& profile) {
  std::vector<DensityMatrix> f;
  f.reserve(profile.players());
  for (std::size_t i = 0; i < profile.players(); ++i)
    f.push_back(DensityMatrix::diagonal(profile[i]));
  return DensityProfile(std::move(f));
}

MixedProfile density_to_mixed(const DensityProfile& profile) {
  std::vector<std::vector<double>> p;
  for (const auto& f : profile.factors()) p.push_back(f.probabilities());
  return MixedProfile(std::move(p));
}

std::vector<double> wavefunction_to_mixed(const ComplexVector& amplitudes,
                                          const NumericPolicy& policy) {
  const double norm2 = amplitudes.squaredNorm();
  if (amplitudes.size() == 0 || std::abs(norm2 - 1.0) > policy.hermiticity)
    throw ValidationError("wavefunction is not normalized");
  std::vector<double> p(static_cast<std::size_t>(amplitudes.size()));
  for (Eigen::Index k = 0; k < amplitudes.size(); ++k)
    p[static_cast<std::size_t>(k)] = std::norm(amplitudes(k));
  return p;
}

MixedProfile wavefunction_to_mixed(std::span<const ComplexVector> amplitudes,
                                   const NumericPolicy& policy) {
  std::vector<std::vector<double>> p;
  for (const auto& a : amplitudes) p.push_back(wavefunction_to_mixed(a, policy));
  // Probabilities from a vector normalized to 1e-10 may miss the tighter
  // simplex tolerance; renormalize explicitly.
  for (auto& v : p) {
    double sum = 0.0;
    for (double x : v) sum += x;
    for (double& x : v) x /= sum;
  }
  return MixedProfile(std::move(p), policy);
}

}  // namespace densegame

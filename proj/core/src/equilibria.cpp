#include "densegame/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "classical_kernel.hpp"
#include "densegame/random.hpp"

namespace densegame {

// ---------------------------------------------------------------------------
// Probability-vector kernels

namespace detail {

DiagonalGame DiagonalGame::from(const AbstractGame& game) {
  DiagonalGame out;
  out.dims = game.shape().dims();
  for (std::size_t i = 0; i < game.players(); ++i) {
    const ComplexMatrix& h = game.payoff_operator(i);
    std::vector<double> v(static_cast<std::size_t>(h.rows()));
    for (Eigen::Index s = 0; s < h.rows(); ++s) v[static_cast<std::size_t>(s)] = h(s, s).real();
    out.values.push_back(std::move(v));
  }
  return out;
}

DiagonalGame DiagonalGame::from(const ClassicalGame& game) {
  DiagonalGame out;
  out.dims = game.shape().dims();
  for (std::size_t i = 0; i < game.players(); ++i) {
    const auto g = game.payoffs(i);
    out.values.emplace_back(g.begin(), g.end());
  }
  return out;
}

Probabilities pure_payoffs(const DiagonalGame& game, const Probabilities& p) {
  const std::size_t n = game.dims.size();
  Probabilities out(n);
  for (std::size_t i = 0; i < n; ++i) out[i].assign(game.dims[i], 0.0);

  const std::size_t joint = game.values.front().size();
  std::vector<std::size_t> digits(n, 0);
  std::vector<double> prefix(n + 1), suffix(n + 1);
  for (std::size_t s = 0; s < joint; ++s) {
    prefix[0] = 1.0;
    for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] * p[j][digits[j]];
    suffix[n] = 1.0;
    for (std::size_t j = n; j-- > 0;) suffix[j] = suffix[j + 1] * p[j][digits[j]];
    for (std::size_t i = 0; i < n; ++i) {
      const double w = prefix[i] * suffix[i + 1];
      if (w != 0.0) out[i][digits[i]] += w * game.values[i][s];
    }
    for (std::size_t j = n; j-- > 0;) {
      if (++digits[j] < game.dims[j]) break;
      digits[j] = 0;
    }
  }
  return out;
}

GainSummary gains(const Probabilities& pure, const Probabilities& p) {
  GainSummary g;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double e = 0.0;
    for (std::size_t mu = 0; mu < p[i].size(); ++mu) e += p[i][mu] * pure[i][mu];
    double best = 0.0;
    double total = 0.0;
    for (double v : pure[i]) {
      const double d = std::max(0.0, v - e);
      best = std::max(best, d);
      total += d;
    }
    g.payoff.push_back(e);
    g.best_gain.push_back(best);
    g.total_gain.push_back(total);
  }
  return g;
}

Probabilities gain_map(const Probabilities& pure, const Probabilities& p, const GainSummary& g) {
  Probabilities out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double denom = 1.0 + g.total_gain[i];
    out[i].resize(p[i].size());
    double sum = 0.0;
    for (std::size_t mu = 0; mu < p[i].size(); ++mu) {
      out[i][mu] = (p[i][mu] + std::max(0.0, pure[i][mu] - g.payoff[i])) / denom;
      sum += out[i][mu];
    }
    for (double& v : out[i]) v /= sum;
  }
  return out;
}

double l1(const Probabilities& a, const Probabilities& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t mu = 0; mu < a[i].size(); ++mu) d += std::abs(a[i][mu] - b[i][mu]);
  return d;
}

DensityProfile to_density(const Probabilities& p) {
  std::vector<DensityMatrix> f;
  f.reserve(p.size());
  for (const auto& v : p) f.push_back(DensityMatrix::diagonal(v));
  return DensityProfile(std::move(f));
}

Probabilities diagonal_of(const DensityProfile& rho) {
  Probabilities p;
  for (const auto& f : rho.factors()) p.push_back(f.probabilities());
  return p;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Certificates

namespace {

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

void require_classical_mode(const AbstractGame& game, const DensityProfile& rho,
                            const NumericPolicy& policy, const char* what) {
  if (!game.is_diagonal())
    throw ValidationError(std::string(what) + ": payoff operators must be diagonal");
  if (!rho.is_diagonal(policy.diagonal))
    throw ValidationError(std::string(what) + ": profile must be diagonal");
  if (rho.dims() != game.shape().dims())
    throw DimensionError(std::string(what) + ": profile does not match the game");
}

double top_eigenvalue(const ComplexMatrix& h) {
  if (is_diagonal(h, 0.0)) return h.diagonal().real().maxCoeff();
  return hermitian_eigen(h).values.maxCoeff();
}

}  // namespace

double NashCertificate::max_gain() const { return max_of(per_player_gain); }
double JointCertificate::max_gain() const { return max_of(per_player_gain); }

ComplexMatrix delta_E(const ComplexMatrix& h_reduced, double payoff, const NumericPolicy& policy) {
  if (h_reduced.rows() != h_reduced.cols()) throw DimensionError("delta_E: matrix not square");
  if (!is_diagonal(h_reduced, policy.diagonal))
    throw ValidationError("delta_E: reduced payoff matrix must be diagonal");
  const Eigen::Index n = h_reduced.rows();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) out(k, k) = std::max(0.0, h_reduced(k, k).real() - payoff);
  return out;
}

DensityProfile nash_map(const AbstractGame& game, const DensityProfile& rho,
                        const NumericPolicy& policy) {
  require_classical_mode(game, rho, policy, "nash_map");
  std::vector<DensityMatrix> next;
  next.reserve(rho.players());
  for (std::size_t i = 0; i < rho.players(); ++i) {
    const ComplexMatrix h_r = reduced_payoff(game, rho, i);
    const double e = payoff_reduced(rho[i], h_r, policy);
    const ComplexMatrix gain = delta_E(h_r, e, policy);
    const double tr = gain.trace().real();
    ComplexMatrix m = (rho[i].matrix() + gain) / (1.0 + tr);
    // Drop rounding residue in the off-diagonal and pin the trace to 1.
    m = ComplexMatrix(m.diagonal().real().cast<Complex>().asDiagonal());
    m /= m.trace().real();
    next.push_back(DensityMatrix::from_matrix(std::move(m), policy));
  }
  return DensityProfile(std::move(next));
}

FixedPointReport iterate_nash_map(const AbstractGame& game, const DensityProfile& rho0,
                                  const FixedPointOptions& options, const NumericPolicy& policy) {
  require_classical_mode(game, rho0, policy, "iterate_nash_map");
  using detail::Probabilities;
  const detail::DiagonalGame diag = detail::DiagonalGame::from(game);

  // Fixed-point test at p: the next step moves < tol and every gain is small.
  struct Probe {
    Probabilities next;
    double residual;
    double delta_norm;
    bool fixed;
  };
  auto probe = [&](const Probabilities& p) {
    const Probabilities pure = detail::pure_payoffs(diag, p);
    const detail::GainSummary g = detail::gains(pure, p);
    Probabilities next = detail::gain_map(pure, p, g);
    const double residual = detail::l1(next, p);
    const double delta_norm = max_of(g.total_gain);
    return Probe{std::move(next), residual, delta_norm,
                 residual < options.tol && delta_norm <= options.gain_tol};
  };
  auto snapped = [&](const Probabilities& p) {
    Probabilities s = p;
    for (auto& v : s) {
      double sum = 0.0;
      for (double& x : v) {
        if (x < options.polish_floor) x = 0.0;
        sum += x;
      }
      for (double& x : v) x /= sum;
    }
    return s;
  };

  Probabilities p = detail::diagonal_of(rho0);
  FixedPointReport report{rho0, 0, 0.0, false, 0.0, false};
  for (std::size_t k = 1; k <= options.max_iter; ++k) {
    Probe step = probe(p);
    report.iterations = k;
    report.residual = step.residual;
    report.delta_E_norm = step.delta_norm;
    if (step.fixed) {
      report.converged = true;
      report.final_profile = detail::to_density(p);
      return report;
    }
    p = std::move(step.next);

    if (options.polish && (k % options.polish_interval == 0 || k == options.max_iter)) {
      const Probabilities s = snapped(p);
      const Probe check = probe(s);
      if (check.fixed) {
        report.converged = true;
        report.polished = true;
        report.residual = check.residual;
        report.delta_E_norm = check.delta_norm;
        report.final_profile = detail::to_density(s);
        return report;
      }
    }
  }
  const Probe last = probe(p);
  report.delta_E_norm = last.delta_norm;
  report.final_profile = detail::to_density(p);
  return report;
}

NashCertificate verify_ne(const AbstractGame& game, const DensityProfile& rho, double eps,
                          const NumericPolicy& policy) {
  if (rho.dims() != game.shape().dims())
    throw DimensionError("verify_ne: profile does not match the game");
  NashCertificate cert{rho, eps, {}, {}};
  for (std::size_t i = 0; i < game.players(); ++i) {
    const ComplexMatrix h_r = reduced_payoff(game, rho, i);
    const double e = payoff_reduced(rho[i], h_r, policy);
    cert.payoffs.push_back(e);
    cert.per_player_gain.push_back(std::max(0.0, top_eigenvalue(h_r) - e));
  }
  return cert;
}

JointCertificate verify_gne(const AbstractGame& game, const JointState& rho_s, double eps,
                            const NumericPolicy& policy) {
  const SpaceShape& shape = game.shape();
  if (rho_s.dim() != shape.joint_dim())
    throw DimensionError("verify_gne: joint state does not match the game");
  JointCertificate cert{rho_s, eps, {}, {}};
  for (std::size_t i = 0; i < game.players(); ++i) {
    const ComplexMatrix& h = game.payoff_operator(i);
    const double e =
        real_payoff(rho_s.matrix().cwiseProduct(h.transpose()).sum(), policy, "verify_gne");
    const ComplexMatrix rest = trace_in(rho_s.matrix(), shape, i);
    ComplexMatrix m = contract_complement(h, shape, i, rest);
    m = 0.5 * (m + m.adjoint());
    cert.payoffs.push_back(e);
    cert.per_player_gain.push_back(std::max(0.0, top_eigenvalue(m) - e));
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Quantum special cases

std::optional<JointState> common_max_eigenvector(const AbstractGame& game, double tol) {
  const auto n = static_cast<Eigen::Index>(game.shape().joint_dim());
  ComplexMatrix basis = ComplexMatrix::Identity(n, n);
  std::vector<double> tops;
  for (const ComplexMatrix& h : game.payoff_operators()) {
    const HermitianEigen eig = hermitian_eigen(h);
    const double top = eig.values.maxCoeff();
    tops.push_back(top);
    const double cut = top - tol * std::max(1.0, std::abs(top));
    std::vector<Eigen::Index> below;
    for (Eigen::Index k = 0; k < eig.values.size(); ++k)
      if (eig.values(k) < cut) below.push_back(k);
    if (below.empty()) continue;
    ComplexMatrix lower(n, static_cast<Eigen::Index>(below.size()));
    for (std::size_t c = 0; c < below.size(); ++c)
      lower.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(below[c]);

    // Keep the part of span(basis) orthogonal to every sub-maximal eigenvector.
    const ComplexMatrix overlap = lower.adjoint() * basis;
    Eigen::JacobiSVD<ComplexMatrix> svd(overlap, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv(k) > 1e-6) ++rank;
    const Eigen::Index keep = basis.cols() - rank;
    if (keep <= 0) return std::nullopt;
    basis = basis * svd.matrixV().rightCols(keep);
  }

  ComplexVector v = basis.col(0);
  v /= v.norm();
  const auto& ops = game.payoff_operators();
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const double err = (ops[k] * v - tops[k] * v).norm();
    if (err > tol * std::max(1.0, std::abs(tops[k]))) return std::nullopt;
  }
  ComplexMatrix proj = v * v.adjoint();
  proj = 0.5 * (proj + proj.adjoint());
  proj /= proj.trace().real();
  return DensityMatrix::from_matrix(std::move(proj));
}

std::vector<ComplexMatrix> local_common_bases(const AbstractGame& game,
                                              const NumericPolicy& policy) {
  const SpaceShape& shape = game.shape();
  std::vector<ComplexMatrix> bases;
  if (game.is_diagonal()) {
    for (std::size_t d : shape.dims()) {
      const auto m = static_cast<Eigen::Index>(d);
      bases.push_back(ComplexMatrix::Identity(m, m));
    }
    return bases;
  }

  double scale = 1.0;
  for (const auto& h : game.payoff_operators()) scale = std::max(scale, max_abs(h));

  // For H^k = W D^k W^dagger with W a product of local unitaries, every
  // Tr_{-i}((A (x) I) H^k) is diagonal in W_i's basis. Random A make the
  // local spectra generic.
  Rng rng(0x51a7d1a6ULL);
  for (std::size_t i = 0; i < shape.players(); ++i) {
    const std::size_t m = shape.joint_dim() / shape.dim(i);
    std::vector<ComplexMatrix> family;
    std::vector<ComplexMatrix> probes{
        ComplexMatrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m))};
    if (m > 1) {
      probes.push_back(random_hermitian(rng, m));
      probes.push_back(random_hermitian(rng, m));
    }
    double local_scale = 1.0;
    for (const auto& h : game.payoff_operators()) {
      for (const auto& a : probes) {
        ComplexMatrix mk = contract_complement(h, shape, i, a);
        mk = 0.5 * (mk + mk.adjoint());
        local_scale = std::max(local_scale, max_abs(mk));
        family.push_back(std::move(mk));
      }
    }
    NumericPolicy local = policy;
    local.commutator = policy.commutator * local_scale * local_scale;
    try {
      bases.push_back(simultaneous_diagonalization(family, local));
    } catch (const NonCommutingError&) {
      throw DiagonalizationError("player " + std::to_string(i + 1) +
                                 ": common eigenbasis is not a product of local bases");
    }
  }

  const ComplexMatrix w = kron_all(bases);
  const double residual = diagonalization_residual(game.payoff_operators(), w);
  if (residual > policy.commutator * scale) {
    throw DiagonalizationError("local bases leave off-diagonal residual " +
                               std::to_string(residual));
  }
  return bases;
}

std::optional<NashCertificate> qne_commuting(const AbstractGame& game, double tol,
                                             const FixedPointOptions& options,
                                             const NumericPolicy& policy) {
  const auto& ops = game.payoff_operators();
  for (std::size_t a = 0; a < ops.size(); ++a)
    for (std::size_t b = a + 1; b < ops.size(); ++b)
      if (max_abs(commutator(ops[a], ops[b])) > tol) return std::nullopt;

  const std::vector<ComplexMatrix> bases = local_common_bases(game, policy);
  const ComplexMatrix w = kron_all(bases);

  std::vector<std::vector<double>> induced;
  for (const auto& h : ops) {
    const ComplexMatrix d = w.adjoint() * h * w;
    std::vector<double> v(static_cast<std::size_t>(d.rows()));
    for (Eigen::Index s = 0; s < d.rows(); ++s) v[static_cast<std::size_t>(s)] = d(s, s).real();
    induced.push_back(std::move(v));
  }
  const ClassicalGame classical(game.shape(), std::move(induced));
  const AbstractGame lifted = build_H_from_G(classical);

  detail::Probabilities p;
  const FixedPointReport report =
      iterate_nash_map(lifted, DensityProfile::uniform(game.shape()), options, policy);
  constexpr double kCertEps = 1e-8;
  if (report.converged && verify_ne(lifted, report.final_profile, kCertEps, policy).valid()) {
    p = detail::diagonal_of(report.final_profile);
  } else {
    bool small = game.players() <= 3;
    for (std::size_t d : game.shape().dims()) small = small && d <= 4;
    if (small) {
      const auto found = brute_force_ne(classical);
      const auto best = std::min_element(found.begin(), found.end(), [](const auto& x, const auto& y) {
        return x.max_gain() < y.max_gain();
      });
      p = detail::diagonal_of(best != found.end() ? best->profile : report.final_profile);
    } else {
      p = detail::diagonal_of(report.final_profile);
    }
  }

  std::vector<DensityMatrix> rotated;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const ComplexMatrix& wi = bases[i];
    RealVector diag(static_cast<Eigen::Index>(p[i].size()));
    for (std::size_t mu = 0; mu < p[i].size(); ++mu) diag(static_cast<Eigen::Index>(mu)) = p[i][mu];
    ComplexMatrix rho = wi * diag.cast<Complex>().asDiagonal() * wi.adjoint();
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace().real();
    rotated.push_back(DensityMatrix::from_matrix(std::move(rho), policy));
  }
  return verify_ne(game, DensityProfile(std::move(rotated)), kCertEps, policy);
}

}  // namespace densegame

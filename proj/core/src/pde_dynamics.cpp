#include "densegame/pde_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <ostream>

#include "densegame/equilibria.hpp"

namespace densegame {

void PdeConfig::validate(std::size_t players) const {
  if (std::isnan(beta) || beta < 0) throw ValidationError("beta must be >= 0");
  if (max_steps < 1) throw ValidationError("max_steps must be >= 1");
  if (cycle_window < 2) throw ValidationError("cycle_window must be >= 2");
  if (thinning < 1) throw ValidationError("thinning must be >= 1");
  if (!(quantize > 0)) throw ValidationError("quantize must be > 0");
  if (order == UpdateOrder::kCustom) {
    std::vector<std::size_t> sorted = permutation;
    std::sort(sorted.begin(), sorted.end());
    bool ok = sorted.size() == players;
    for (std::size_t k = 0; ok && k < sorted.size(); ++k) ok = sorted[k] == k;
    if (!ok) throw ValidationError("custom order must be a permutation of the players");
  }
}

std::string PatternReport::summary() const {
  switch (kind) {
    case PatternKind::kConverged:
      return "converged";
    case PatternKind::kCycle:
      return "cycle:" + std::to_string(period);
    case PatternKind::kNone:
      break;
  }
  return "none";
}

DensityMatrix boltzmann_update(const ComplexMatrix& h_reduced, double beta, bool allow_quantum,
                               const NumericPolicy& policy) {
  require_hermitian(h_reduced, policy.hermiticity, "boltzmann_update");
  if (is_diagonal(h_reduced, policy.diagonal)) {
    const ComplexMatrix diag = h_reduced.diagonal().asDiagonal();
    return DensityMatrix::from_matrix(herm_expm_normalized(diag, beta, policy), policy);
  }
  if (!allow_quantum)
    throw ValidationError("boltzmann_update: non-diagonal reduced payoff needs quantum mode");
  return DensityMatrix::from_matrix(herm_expm_normalized(h_reduced, beta, policy), policy);
}

DensityProfile pde_step(const AbstractGame& game, const DensityProfile& rho, const PdeConfig& cfg,
                        const NumericPolicy& policy) {
  const std::size_t n = game.players();
  if (cfg.order == UpdateOrder::kSimultaneous) {
    std::vector<DensityMatrix> next;
    next.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      next.push_back(boltzmann_update(reduced_payoff(game, rho, i), cfg.beta, cfg.quantum, policy));
    return DensityProfile(std::move(next));
  }

  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  if (cfg.order == UpdateOrder::kCustom) order = cfg.permutation;

  DensityProfile current = rho;
  for (std::size_t i : order)
    current.set(i, boltzmann_update(reduced_payoff(game, current, i), cfg.beta, cfg.quantum, policy));
  return current;
}

double profile_distance(const DensityProfile& a, const DensityProfile& b) {
  if (a.dims() != b.dims()) throw DimensionError("profile_distance: dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.players(); ++i) d += l1_distance(a[i].matrix(), b[i].matrix());
  return d;
}

namespace {

std::vector<long long> quantized_key(const DensityProfile& rho, double q) {
  std::vector<long long> key;
  for (const auto& f : rho.factors()) {
    const ComplexMatrix& m = f.matrix();
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      key.push_back(std::llround(m.data()[k].real() / q));
      key.push_back(std::llround(m.data()[k].imag() / q));
    }
  }
  return key;
}

TrajectoryStep snapshot(const AbstractGame& game, const DensityProfile& rho, std::size_t step,
                        const NumericPolicy& policy) {
  TrajectoryStep s{step, rho, {}, {}};
  for (std::size_t i = 0; i < game.players(); ++i) {
    const ComplexMatrix h_r = reduced_payoff(game, rho, i);
    s.payoffs.push_back(payoff_reduced(rho[i], h_r, policy));
    std::vector<double> diag(static_cast<std::size_t>(h_r.rows()));
    for (Eigen::Index k = 0; k < h_r.rows(); ++k) diag[static_cast<std::size_t>(k)] = h_r(k, k).real();
    s.reduced_diagonals.push_back(std::move(diag));
  }
  return s;
}

}  // namespace

PdeRun pde_run(const AbstractGame& game, const DensityProfile& rho0, const PdeConfig& cfg,
               const NumericPolicy& policy) {
  cfg.validate(game.players());
  if (rho0.dims() != game.shape().dims())
    throw DimensionError("pde_run: profile does not match the game");

  struct Seen {
    std::size_t step;
    std::vector<long long> key;
  };
  std::deque<Seen> window;
  window.push_back({0, quantized_key(rho0, cfg.quantize)});

  PdeRun run{{}, {}, rho0};
  DensityProfile current = rho0;
  for (std::size_t step = 1; step <= cfg.max_steps; ++step) {
    DensityProfile next = pde_step(game, current, cfg, policy);
    const double residual = profile_distance(next, current);
    run.pattern.residual = residual;
    run.pattern.steps = step;

    bool done = false;
    if (residual < cfg.tol) {
      run.pattern.kind = PatternKind::kConverged;
      done = true;
    } else {
      std::vector<long long> key = quantized_key(next, cfg.quantize);
      for (auto it = window.rbegin(); it != window.rend(); ++it) {
        if (it->key != key) continue;
        const std::size_t period = step - it->step;
        if (period >= 2) {
          run.pattern.kind = PatternKind::kCycle;
          run.pattern.period = period;
          done = true;
        }
        break;
      }
      window.push_back({step, std::move(key)});
      if (window.size() > cfg.cycle_window) window.pop_front();
    }

    if (done || step == cfg.max_steps || step % cfg.thinning == 0)
      run.trajectory.steps.push_back(snapshot(game, next, step, policy));
    current = std::move(next);
    if (done) break;
  }
  run.final_profile = current;
  return run;
}

std::vector<double> master_equation_rhs(std::span<const double> p, std::span<const double> payoffs,
                                        double beta) {
  if (p.size() != payoffs.size() || p.empty())
    throw DimensionError("master_equation_rhs: size mismatch");
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= -1e-12)) throw ValidationError("master_equation_rhs: negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ValidationError("master_equation_rhs: probabilities do not sum to 1");
  if (std::isnan(beta) || beta < 0 || std::isinf(beta))
    throw ValidationError("master_equation_rhs: beta must be finite and >= 0");

  const double top = *std::max_element(payoffs.begin(), payoffs.end());
  std::vector<double> rate(p.size());
  double z = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    rate[x] = std::exp(beta * (payoffs[x] - top));
    z += rate[x];
  }
  for (double& r : rate) r /= z;

  // w(x' -> x) = rate[x] regardless of the source state x'.
  std::vector<double> rhs(p.size(), 0.0);
  for (std::size_t x = 0; x < p.size(); ++x) {
    double gain = 0.0;
    double loss = 0.0;
    for (std::size_t from = 0; from < p.size(); ++from) {
      gain += rate[x] * p[from];
      loss += rate[from] * p[x];
    }
    rhs[x] = gain - loss;
  }
  return rhs;
}

NashPdeComparison nash_map_comparison(const AbstractGame& game, const DensityProfile& rho,
                                      double beta, const NumericPolicy& policy) {
  PdeConfig cfg;
  cfg.beta = beta;
  cfg.order = UpdateOrder::kSimultaneous;
  DensityProfile nash = nash_map(game, rho, policy);
  DensityProfile pde = pde_step(game, rho, cfg, policy);
  const double d = profile_distance(nash, pde);
  return {std::move(nash), std::move(pde), d};
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "step,player,entry_index,probability,payoff\n";
  char prob[40];
  char pay[40];
  for (const TrajectoryStep& s : trajectory.steps) {
    for (std::size_t i = 0; i < s.profile.players(); ++i) {
      const auto p = s.profile[i].probabilities();
      for (std::size_t mu = 0; mu < p.size(); ++mu) {
        std::snprintf(prob, sizeof prob, "%.17g", p[mu]);
        std::snprintf(pay, sizeof pay, "%.17g", s.reduced_diagonals[i][mu]);
        out << s.step << ',' << (i + 1) << ',' << mu << ',' << prob << ',' << pay << '\n';
      }
    }
  }
}

}  // namespace densegame

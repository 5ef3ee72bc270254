#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>

#include "classical_kernel.hpp"
#include "densegame/equilibria.hpp"

namespace densegame {

namespace {

using detail::Probabilities;

struct Candidate {
  Probabilities p;
  double gain;
};

std::vector<std::vector<std::size_t>> support_of(const Probabilities& p) {
  std::vector<std::vector<std::size_t>> s(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t mu = 0; mu < p[i].size(); ++mu)
      if (p[i][mu] > 1e-12) s[i].push_back(mu);
  return s;
}

bool support_then_probability_less(const Candidate& a, const Candidate& b) {
  const auto sa = support_of(a.p);
  const auto sb = support_of(b.p);
  if (sa != sb) return sa < sb;
  return a.p < b.p;
}

std::vector<std::vector<std::size_t>> subsets(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (std::size_t{1} << k)) s.push_back(k);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Solves for a distribution x on `cols` making payoff[rows, cols] x constant
// across rows. Returns nothing when the system is inconsistent or x < 0.
std::optional<std::vector<double>> indifference(const Eigen::MatrixXd& payoff,
                                                const std::vector<std::size_t>& rows,
                                                const std::vector<std::size_t>& cols) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto n = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, n + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < n; ++c)
      a(r, c) = payoff(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)]),
                       static_cast<Eigen::Index>(cols[static_cast<std::size_t>(c)]));
    a(r, n) = -1.0;
  }
  for (Eigen::Index c = 0; c < n; ++c) a(m, c) = 1.0;
  b(m) = 1.0;

  const Eigen::VectorXd x = a.completeOrthogonalDecomposition().solve(b);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a * x - b).cwiseAbs().maxCoeff() > 1e-10 * scale) return std::nullopt;
  std::vector<double> out(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    if (x(c) < -1e-12) return std::nullopt;
    out[static_cast<std::size_t>(c)] = std::max(0.0, x(c));
    sum += out[static_cast<std::size_t>(c)];
  }
  for (double& v : out) v /= sum;
  return out;
}

std::vector<Candidate> support_enumeration(const ClassicalGame& game, double accept) {
  const std::size_t rows = game.shape().dim(0);
  const std::size_t cols = game.shape().dim(1);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  Eigen::MatrixXd bt(static_cast<Eigen::Index>(cols), static_cast<Eigen::Index>(rows));
  double range = 1.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t s = r * cols + c;
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = game.payoffs(0)[s];
      bt(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = game.payoffs(1)[s];
      range = std::max({range, std::abs(game.payoffs(0)[s]), std::abs(game.payoffs(1)[s])});
    }
  }

  const detail::DiagonalGame diag = detail::DiagonalGame::from(game);
  std::vector<Candidate> found;
  for (const auto& row_support : subsets(rows)) {
    for (const auto& col_support : subsets(cols)) {
      // Column player's mix makes the row player indifferent on row_support,
      // and vice versa.
      const auto q = indifference(a, row_support, col_support);
      if (!q) continue;
      const auto p = indifference(bt, col_support, row_support);
      if (!p) continue;
      Probabilities profile{std::vector<double>(rows, 0.0), std::vector<double>(cols, 0.0)};
      for (std::size_t k = 0; k < row_support.size(); ++k) profile[0][row_support[k]] = (*p)[k];
      for (std::size_t k = 0; k < col_support.size(); ++k) profile[1][col_support[k]] = (*q)[k];

      const auto g = detail::gains(detail::pure_payoffs(diag, profile), profile);
      const double gain = std::max(g.best_gain[0], g.best_gain[1]);
      if (gain > accept * range) continue;
      const bool duplicate = std::any_of(found.begin(), found.end(), [&](const Candidate& c) {
        return detail::l1(c.p, profile) <= 1e-9;
      });
      if (!duplicate) found.push_back({std::move(profile), gain});
    }
  }
  return found;
}

// All ways to write `total` as an ordered sum of `parts` non-negative integers.
void compositions(std::size_t total, std::size_t parts, std::vector<std::size_t>& current,
                  std::vector<std::vector<std::size_t>>& out) {
  if (parts == 1) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (std::size_t k = total + 1; k-- > 0;) {
    current.push_back(k);
    compositions(total - k, parts - 1, current, out);
    current.pop_back();
  }
}

std::vector<Candidate> grid_search(const ClassicalGame& game, const OracleOptions& options) {
  const std::size_t n = game.players();
  const std::size_t r = options.resolution;
  std::vector<std::vector<std::vector<std::size_t>>> grids(n);
  std::vector<std::map<std::vector<std::size_t>, std::size_t>> lookup(n);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> scratch;
    compositions(r, game.shape().dim(i), scratch, grids[i]);
    for (std::size_t k = 0; k < grids[i].size(); ++k) lookup[i][grids[i][k]] = k;
    if (total > options.max_grid_points / grids[i].size())
      throw SizeLimitError("oracle grid exceeds " + std::to_string(options.max_grid_points) +
                           " points; lower the resolution");
    total *= grids[i].size();
  }

  double range = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (double v : game.payoffs(i)) range = std::max(range, std::abs(v));

  const detail::DiagonalGame diag = detail::DiagonalGame::from(game);
  auto profile_at = [&](std::size_t flat) {
    Probabilities p(n);
    for (std::size_t i = n; i-- > 0;) {
      const auto& comp = grids[i][flat % grids[i].size()];
      flat /= grids[i].size();
      for (std::size_t c : comp) p[i].push_back(static_cast<double>(c) / static_cast<double>(r));
    }
    return p;
  };

  std::vector<double> eps(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    const Probabilities p = profile_at(flat);
    const auto g = detail::gains(detail::pure_payoffs(diag, p), p);
    eps[flat] = *std::max_element(g.best_gain.begin(), g.best_gain.end());
  }

  // Nearest grid point to an exact equilibrium is within sum_i L_i / r in L1.
  double spread = 0.0;
  for (std::size_t d : game.shape().dims()) spread += static_cast<double>(d);
  const double bound = 2.0 * range * spread / static_cast<double>(r);

  std::vector<std::size_t> strides(n, 1);
  for (std::size_t i = n - 1; i-- > 0;) strides[i] = strides[i + 1] * grids[i + 1].size();

  // Grid neighbours of each player's composition (one unit moved), itself first.
  std::vector<std::vector<std::vector<std::size_t>>> moves(n);
  for (std::size_t i = 0; i < n; ++i) {
    moves[i].resize(grids[i].size());
    for (std::size_t k = 0; k < grids[i].size(); ++k) {
      moves[i][k].push_back(k);
      std::vector<std::size_t> comp = grids[i][k];
      for (std::size_t from = 0; from < comp.size(); ++from) {
        if (comp[from] == 0) continue;
        for (std::size_t to = 0; to < comp.size(); ++to) {
          if (to == from) continue;
          --comp[from];
          ++comp[to];
          moves[i][k].push_back(lookup[i].at(comp));
          ++comp[from];
          --comp[to];
        }
      }
    }
  }

  // A point survives when no joint move (any subset of players stepping at
  // once) lowers the max gain; single-player moves alone leave plateaus.
  auto local_min = [&](std::size_t flat) {
    std::vector<std::size_t> idx(n);
    std::size_t rest = flat;
    for (std::size_t i = n; i-- > 0;) {
      idx[i] = rest % grids[i].size();
      rest /= grids[i].size();
    }
    std::vector<std::size_t> choice(n, 0);
    while (true) {
      std::size_t i = 0;
      while (i < n && ++choice[i] == moves[i][idx[i]].size()) choice[i++] = 0;
      if (i == n) return true;
      std::size_t neighbour = 0;
      for (std::size_t j = 0; j < n; ++j) neighbour += moves[j][idx[j]][choice[j]] * strides[j];
      if (eps[neighbour] < eps[flat]) return false;
    }
  };

  std::vector<Candidate> found;
  for (std::size_t flat = 0; flat < total; ++flat)
    if (eps[flat] <= bound && local_min(flat)) found.push_back({profile_at(flat), eps[flat]});

  // Plateau points of one basin collapse onto the lowest-gain representative.
  std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.p < b.p;
  });
  const double merge = 2.0 * spread / static_cast<double>(r);
  std::vector<Candidate> kept;
  for (Candidate& c : found) {
    const bool near = std::any_of(kept.begin(), kept.end(), [&](const Candidate& k) {
      return detail::l1(k.p, c.p) <= merge;
    });
    if (!near) kept.push_back(std::move(c));
  }
  found = std::move(kept);
  if (found.size() > options.max_results) found.resize(options.max_results);
  return found;
}

}  // namespace

std::vector<NashCertificate> brute_force_ne(const ClassicalGame& game,
                                            const OracleOptions& options) {
  if (game.players() > 3) throw SizeLimitError("oracle supports at most 3 players");
  for (std::size_t d : game.shape().dims())
    if (d > 4) throw SizeLimitError("oracle supports at most 4 strategies per player");
  if (options.resolution == 0 || options.resolution > 50)
    throw SizeLimitError("oracle resolution must be in [1, 50]");

  std::vector<Candidate> found = game.players() == 2 ? support_enumeration(game, options.accept)
                                                     : grid_search(game, options);
  std::sort(found.begin(), found.end(), support_then_probability_less);

  const AbstractGame lifted = build_H_from_G(game);
  std::vector<NashCertificate> out;
  out.reserve(found.size());
  for (const Candidate& c : found) {
    NashCertificate cert = verify_ne(lifted, detail::to_density(c.p), 0.0);
    cert.epsilon = std::max(c.gain, cert.max_gain());
    out.push_back(std::move(cert));
  }
  return out;
}

std::vector<NashCertificate> brute_force_ne(const ClassicalGame& game, std::size_t resolution) {
  OracleOptions options;
  options.resolution = resolution;
  return brute_force_ne(game, options);
}

}  // namespace densegame

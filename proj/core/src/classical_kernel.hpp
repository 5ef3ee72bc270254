#pragma once

// Probability-vector kernels shared by the fixed-point iteration and the
// oracle. Internal; not installed.

#include <cstddef>
#include <vector>

#include "densegame/game_model.hpp"

namespace densegame::detail {

using Probabilities = std::vector<std::vector<double>>;

// Diagonal payoff data: values[i][s] = H^i_{ss}.
struct DiagonalGame {
  std::vector<std::size_t> dims;
  std::vector<std::vector<double>> values;

  static DiagonalGame from(const AbstractGame& game);
  static DiagonalGame from(const ClassicalGame& game);
};

// payoff[i][mu]: player i's payoff for pure strategy mu against the others.
Probabilities pure_payoffs(const DiagonalGame& game, const Probabilities& p);

struct GainSummary {
  std::vector<double> payoff;      // E^i
  std::vector<double> best_gain;   // max_mu (payoff_mu - E^i), clamped at 0
  std::vector<double> total_gain;  // sum_mu max(0, payoff_mu - E^i)
};

GainSummary gains(const Probabilities& pure, const Probabilities& p);

// One gain-map step; returns the mapped profile.
Probabilities gain_map(const Probabilities& pure, const Probabilities& p, const GainSummary& g);

double l1(const Probabilities& a, const Probabilities& b);

DensityProfile to_density(const Probabilities& p);
Probabilities diagonal_of(const DensityProfile& rho);

}  // namespace densegame::detail

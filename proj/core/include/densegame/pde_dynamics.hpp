#pragma once

// Boltzmann response dynamics: every player relaxes to
// exp(beta H_R) / Tr exp(beta H_R) against the others' current state,
// sequentially or simultaneously, until the trajectory settles or cycles.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "densegame/game_model.hpp"

namespace densegame {

enum class UpdateOrder {
  kRoundRobin,    // players 0, 1, ..., N-1, each update visible to the next
  kCustom,        // sequential in PdeConfig::permutation order
  kSimultaneous,  // every update computed from the step-start profile
};

struct PdeConfig {
  // Inverse temperature; +infinity selects the best-response limit.
  double beta = 1.0;
  UpdateOrder order = UpdateOrder::kRoundRobin;
  std::vector<std::size_t> permutation;  // used with kCustom
  double tol = 1e-10;                    // L1 distance between successive profiles
  std::size_t max_steps = 10000;
  std::size_t cycle_window = 64;
  double quantize = 1e-9;  // grid used to compare states for cycle detection
  std::size_t thinning = 1;  // record every k-th step (the last step is always kept)
  // Allow non-diagonal reduced payoff matrices (matrix exponential path).
  bool quantum = false;

  void validate(std::size_t players) const;
};

struct TrajectoryStep {
  std::size_t step = 0;
  DensityProfile profile;
  std::vector<double> payoffs;                        // E^i at the snapshot
  std::vector<std::vector<double>> reduced_diagonals;  // diag(H^i_R) at the snapshot
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
};

enum class PatternKind { kConverged, kCycle, kNone };

struct PatternReport {
  PatternKind kind = PatternKind::kNone;
  double residual = 0.0;
  std::size_t period = 0;  // only for kCycle
  std::size_t steps = 0;   // steps taken

  // "converged", "cycle:<period>" or "none".
  std::string summary() const;
};

struct PdeRun {
  Trajectory trajectory;
  PatternReport pattern;
  DensityProfile final_profile;
};

DensityMatrix boltzmann_update(const ComplexMatrix& h_reduced, double beta,
                               bool allow_quantum = false,
                               const NumericPolicy& policy = kDefaultPolicy);

DensityProfile pde_step(const AbstractGame& game, const DensityProfile& rho, const PdeConfig& cfg,
                        const NumericPolicy& policy = kDefaultPolicy);

PdeRun pde_run(const AbstractGame& game, const DensityProfile& rho0, const PdeConfig& cfg,
               const NumericPolicy& policy = kDefaultPolicy);

// dp/dt of the master equation with rate w(x' -> x) = softmax(beta E)_x.
std::vector<double> master_equation_rhs(std::span<const double> p, std::span<const double> payoffs,
                                        double beta);

struct NashPdeComparison {
  DensityProfile nash;
  DensityProfile pde;
  double distance = 0.0;  // entrywise L1 over all players
};

NashPdeComparison nash_map_comparison(const AbstractGame& game, const DensityProfile& rho,
                                      double beta, const NumericPolicy& policy = kDefaultPolicy);

double profile_distance(const DensityProfile& a, const DensityProfile& b);

// step,player,entry_index,probability,payoff; one row per diagonal entry
// per player per recorded step. player is 1-based, entry_index 0-based.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace densegame

#pragma once

// Shared state of one CLI invocation: the parsed document, its compiled
// payoff operators and profile lookup.

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "densegame/equilibria.hpp"
#include "densegame/game_io.hpp"
#include "densegame/quantum_game.hpp"
#include "densegame/random.hpp"

namespace densegame::cli {

// %.12g, with negative zero printed as 0.
std::string fmt(double v);
std::string fmt_list(std::span<const double> values);
// [[re, im], ...] rows
std::string fmt_matrix(const ComplexMatrix& m);

struct Profile {
  std::string name;
  bool operators = false;
  std::vector<ComplexMatrix> ops;        // when operators
  std::optional<DensityProfile> density;  // otherwise
};

class Session {
 public:
  explicit Session(GameDocument doc);

  const GameDocument& doc() const noexcept { return doc_; }
  const AbstractGame& abstract();
  SpaceShape shape() const;
  GameClass game_class();
  // The game with its (within-tolerance) diagonal operators made exactly
  // diagonal; only valid when game_class() is kDiagonal.
  const AbstractGame& diagonal_game();
  const ClassicalGame& classical();

  // "uniform", "random", "pure:i,j,..." (0-based entries) or a profile named
  // in the file.
  Profile resolve_profile(const std::string& spec, Rng& rng, bool diagonal_random = true);

  // path: auto | classical | trace | reduced
  std::vector<double> payoffs(const Profile& profile, const std::string& path = "auto");

 private:
  GameDocument doc_;
  std::optional<AbstractGame> abstract_;
  std::optional<GameClass> class_;
  std::optional<AbstractGame> diagonal_;
  std::optional<ClassicalGame> classical_;
};

// One line per player: strategy (or state) with payoff and gain. Without
// with_verdict only the max gain is reported.
void print_certificate(std::ostream& out, const NashCertificate& cert, bool with_verdict = true);
nlohmann::ordered_json certificate_json(const NashCertificate& cert);
nlohmann::ordered_json matrix_json(const ComplexMatrix& m);

}  // namespace densegame::cli

#pragma once

// densegame <payoff|solve|pde|quantum|classify> <file> [flags]
//
// Exit codes: 0 success, 2 input error, 3 honest non-convergence.

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "densegame/game_io.hpp"

namespace densegame::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNoConvergence = 3;

// Machine-readable record of one invocation, written with --result.
struct RunResult {
  std::vector<std::string> command;
  std::uint64_t seed = 0;
  nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
  double wall_time = 0.0;  // seconds
  int exit_code = 0;

  nlohmann::ordered_json to_json() const;
  static RunResult from_json(const nlohmann::ordered_json& j);

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

struct SelfTestOutcome {
  std::string check;
  bool passed = false;
  std::string detail;
};

// Runs the assertions listed in the file's "self_test" array.
std::vector<SelfTestOutcome> run_self_test(const GameDocument& doc);

// args excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace densegame::cli

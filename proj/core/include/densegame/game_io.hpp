#pragma once

// JSON game files. A file declares its kind (classical, abstract or
// operator) explicitly; complex numbers are always [re, im] pairs.
//
//   {
//     "format_version": 1,
//     "kind": "classical",
//     "name": "matching_pennies",
//     "players": 2,
//     "dims": [2, 2],
//     "payoffs": [[[1, -1], [-1, 1]], [[-1, 1], [1, -1]]],
//     "profiles": {"heads": [[1, 0], [1, 0]]},
//     "self_test": [{"check": "payoff", "profile": "uniform", "player": 1, "expect": 0}]
//   }

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "densegame/game_model.hpp"
#include "densegame/quantum_game.hpp"

namespace densegame {

inline constexpr int kFormatVersion = 1;

enum class GameKind { kClassical, kAbstract, kOperator };

std::string to_string(GameKind kind);

using AnyGame = std::variant<ClassicalGame, AbstractGame, OperatorGame>;

// A named profile from the file. For classical and abstract games each state
// is a validated density matrix on the player's strategy space. For operator
// games a profile lists either operators on the object (operators = true) or
// density matrices on the players' operator spaces.
struct ProfileSpec {
  std::string name;
  bool operators = false;
  std::vector<ComplexMatrix> states;
};

struct GameDocument {
  std::string name;
  GameKind kind = GameKind::kClassical;
  AnyGame game;
  std::vector<ProfileSpec> profiles;
  std::string self_test;  // JSON array text; empty when absent
  std::string solver;     // JSON object text; empty when absent

  const ProfileSpec* find_profile(std::string_view profile_name) const;
};

// Syntax errors raise ParseError with 1-based line and column; structural and
// invariant violations raise ValidationError (or a subclass) naming the
// offending field, e.g. "payoffs[1][0]: expected a number".
GameDocument parse_game(const std::filesystem::path& path);
GameDocument parse_game_text(std::string_view text);

// Payoff operators of any game kind: the diagonal lift of a classical game,
// the operators of an abstract game, build_abstract of an operator game.
AbstractGame to_abstract(const AnyGame& game);

std::string serialize_game(const ClassicalGame& game, std::string_view name);
std::string serialize_game(const AbstractGame& game, std::string_view name);

}  // namespace densegame

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "support.hpp"

#include "cli.hpp"

using namespace densegame;
using namespace densegame::test;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "densegame_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("payoff command") {
  const Outcome o = run({"payoff", data_file("matching_pennies"), "--profile", "uniform"});
  CHECK(o.code == 0);
  CHECK(o.out.find("player=1 payoff=0\n") != std::string::npos);
  CHECK(o.out.find("player=2 payoff=0\n") != std::string::npos);

  const Outcome pure = run({"payoff", data_file("prisoners_dilemma"), "--profile", "pure:1,0"});
  CHECK(pure.code == 0);
  CHECK(pure.out.find("player=1 payoff=5\n") != std::string::npos);

  const Outcome trace =
      run({"payoff", data_file("prisoners_dilemma"), "--profile", "uniform", "--path", "trace"});
  CHECK(trace.out.find("player=1 payoff=2.25\n") != std::string::npos);
}

TEST_CASE("solve command") {
  const Outcome oracle = run({"solve", data_file("matching_pennies"), "--method", "oracle"});
  CHECK(oracle.code == 0);
  CHECK(oracle.out.find("equilibria=1\n") != std::string::npos);
  CHECK(oracle.out.find("strategy=[0.5, 0.5]") != std::string::npos);

  const Outcome fixed = run({"solve", data_file("prisoners_dilemma")});
  CHECK((fixed.code == 0 || fixed.code == 3));
  if (fixed.code == 0) CHECK(fixed.out.find("valid=true") != std::string::npos);

  const Outcome capped = run({"solve", data_file("prisoners_dilemma"), "--max-iter", "2"});
  CHECK(capped.code == 3);

  const Outcome general = run({"solve", data_file("noncommuting_quantum")});
  CHECK(general.code == 2);
}

TEST_CASE("pde command writes CSV") {
  const auto csv = scratch("pd.csv");
  const Outcome o = run({"pde", data_file("prisoners_dilemma"), "--beta", "10", "--csv",
                         csv.string()});
  CHECK(o.code == 0);
  CHECK(o.out.find("pattern=converged\n") != std::string::npos);
  std::istringstream lines(slurp(csv));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "step,player,entry_index,probability,payoff");
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 3 * 4);

  const Outcome cold = run({"pde", data_file("coordination"), "--beta", "0"});
  CHECK(cold.out.find("pattern=converged\n") != std::string::npos);
  CHECK(cold.out.find("steps=1 ") != std::string::npos);
}

TEST_CASE("quantum command") {
  const auto built = scratch("pf_abstract.json");
  const Outcome b = run({"quantum", data_file("penny_flip"), "--build", built.string()});
  CHECK(b.code == 0);
  const GameDocument doc = parse_game(built);
  CHECK(doc.kind == GameKind::kAbstract);
  CHECK(std::get<AbstractGame>(doc.game).shape().joint_dim() == 16);

  const Outcome v =
      run({"quantum", data_file("penny_flip"), "--verify", "--samples", "1000", "--seed", "4"});
  CHECK(v.code == 0);
  CHECK(v.out.find("equivalent=true") != std::string::npos);
}

TEST_CASE("classify command") {
  CHECK(run({"classify", data_file("coordination")}).out == "diagonal\n");
  CHECK(run({"classify", data_file("commuting_quantum")}).out == "co-diagonalizable\n");
  CHECK(run({"classify", data_file("noncommuting_quantum"), "--entangled"}).out ==
        "general entangled\n");
}

TEST_CASE("input errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate", data_file("coordination")}).code == 2);
  CHECK(run({"payoff", "/nonexistent/file.json"}).code == 2);
  CHECK(run({"payoff", data_file("coordination"), "--profile", "pure:9,0"}).code == 2);
  CHECK(run({"pde", data_file("coordination"), "--beta", "-1"}).code == 2);

  const auto broken = scratch("broken.json");
  const std::string full = slurp(data_file("coordination"));
  std::ofstream(broken, std::ios::binary) << full.substr(0, full.size() / 2);
  const Outcome o = run({"classify", broken.string()});
  CHECK(o.code == 2);
  CHECK(o.err.find(broken.string() + ":") == 0);
}

TEST_CASE("every bundled file passes its self test") {
  for (const auto& entry : std::filesystem::directory_iterator(DENSEGAME_DATA_DIR)) {
    CAPTURE(entry.path().string());
    const Outcome o = run({"classify", entry.path().string(), "--self-test"});
    CHECK(o.code == 0);
    CHECK(o.out.find("failed=0") != std::string::npos);
  }
}

TEST_CASE("identical invocations give identical output") {
  const std::vector<std::vector<std::string>> commands{
      {"payoff", data_file("commuting_quantum"), "--profile", "random", "--seed", "9"},
      {"solve", data_file("public_goods_3p"), "--method", "oracle"},
      {"pde", data_file("matching_pennies"), "--beta", "40", "--start", "random", "--seed", "2"},
      {"quantum", data_file("penny_flip"), "--verify", "--samples", "50", "--seed", "1"},
      {"classify", data_file("penny_flip")},
  };
  for (const auto& cmd : commands) {
    CAPTURE(cmd[0]);
    const Outcome a = run(cmd);
    const Outcome b = run(cmd);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
  const auto c1 = scratch("mp1.csv"), c2 = scratch("mp2.csv");
  run({"pde", data_file("matching_pennies"), "--beta", "5", "--csv", c1.string()});
  run({"pde", data_file("matching_pennies"), "--beta", "5", "--csv", c2.string()});
  CHECK(slurp(c1) == slurp(c2));
}

TEST_CASE("run result round trip") {
  const auto path = scratch("result.json");
  const Outcome o = run({"solve", data_file("coordination"), "--method", "oracle", "--seed", "5",
                         "--result", path.string()});
  CHECK(o.code == 0);
  const auto j = nlohmann::ordered_json::parse(slurp(path));
  const cli::RunResult r = cli::RunResult::from_json(j);
  CHECK(r.seed == 5);
  CHECK(r.exit_code == 0);
  CHECK(r.command.front() == "solve");
  CHECK(r.to_json() == j);
  CHECK(cli::RunResult::from_json(r.to_json()) == r);
}

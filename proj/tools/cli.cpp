#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"

#include "densegame/equilibria.hpp"
#include "densegame/pde_dynamics.hpp"
#include "session.hpp"

namespace densegame::cli {

using nlohmann::ordered_json;

ordered_json RunResult::to_json() const {
  ordered_json j;
  j["command"] = command;
  j["seed"] = seed;
  j["outputs"] = outputs;
  j["wall_time"] = wall_time;
  j["exit_code"] = exit_code;
  return j;
}

RunResult RunResult::from_json(const ordered_json& j) {
  RunResult r;
  r.command = j.at("command").get<std::vector<std::string>>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.outputs = j.at("outputs");
  r.wall_time = j.at("wall_time").get<double>();
  r.exit_code = j.at("exit_code").get<int>();
  return r;
}

namespace {

struct Common {
  std::string file;
  bool self_test = false;
  std::uint64_t seed = 0;
  std::string result;
};

struct PayoffOptions {
  std::string profile = "uniform";
  std::size_t player = 0;  // 0 = all
  std::string path = "auto";
};

struct SolveOptions {
  std::string method = "fixed-point";
  double tol = 1e-10;
  std::size_t max_iter = 100000;
  std::string start = "uniform";
  std::size_t resolution = 20;
};

struct PdeOptions {
  std::string beta = "1";
  std::string order = "round-robin";
  std::size_t steps = 1000;
  double tol = 1e-10;
  std::string csv;
  bool quantum = false;
  std::size_t cycle_window = 64;
  std::size_t thinning = 1;
  std::string start = "uniform";
};

struct QuantumOptions {
  std::string build;
  bool verify = false;
  std::size_t samples = 1000;
  bool require_unitary = false;
};

struct ClassifyOptions {
  bool entangled = false;
};

constexpr double kCertificateEps = 1e-8;
constexpr double kEquivalenceThreshold = 1e-9;

void header(std::ostream& out, const GameDocument& doc) {
  out << "game=" << (doc.name.empty() ? "(unnamed)" : doc.name) << " kind=" << to_string(doc.kind)
      << "\n";
}

int cmd_payoff(Session& s, const Common& c, const PayoffOptions& o, std::ostream& out,
               ordered_json& outputs) {
  Rng rng = make_rng(c.seed);
  const Profile profile = s.resolve_profile(o.profile, rng);
  const std::vector<double> pay = s.payoffs(profile, o.path);
  if (o.player > pay.size())
    throw ValidationError("--player must be between 1 and " + std::to_string(pay.size()));

  header(out, s.doc());
  out << "profile=" << profile.name << "\n";
  auto list = ordered_json::array();
  for (std::size_t i = 0; i < pay.size(); ++i) {
    if (o.player != 0 && o.player != i + 1) continue;
    out << "player=" << (i + 1) << " payoff=" << fmt(pay[i]) << "\n";
    list.push_back({{"player", i + 1}, {"payoff", pay[i]}});
  }
  outputs["profile"] = profile.name;
  outputs["payoffs"] = std::move(list);
  return kExitOk;
}

int solve_oracle(Session& s, const SolveOptions& o, std::ostream& out, ordered_json& outputs) {
  OracleOptions options;
  options.resolution = o.resolution;
  const std::vector<NashCertificate> certs = brute_force_ne(s.classical(), options);
  out << "equilibria=" << certs.size() << "\n";
  auto list = ordered_json::array();
  for (std::size_t k = 0; k < certs.size(); ++k) {
    out << "equilibrium=" << (k + 1) << " ";
    print_certificate(out, certs[k]);
    list.push_back(certificate_json(certs[k]));
  }
  outputs["equilibria"] = std::move(list);
  return certs.empty() ? kExitNoConvergence : kExitOk;
}

int cmd_solve(Session& s, const Common& c, const SolveOptions& o, std::ostream& out,
              std::ostream& err, ordered_json& outputs) {
  if (o.method != "fixed-point" && o.method != "oracle")
    throw ValidationError("--method must be fixed-point or oracle");
  header(out, s.doc());
  out << "method=" << o.method << "\n";
  outputs["method"] = o.method;
  if (o.method == "oracle") return solve_oracle(s, o, out, outputs);

  FixedPointOptions options;
  options.tol = o.tol;
  options.max_iter = o.max_iter;
  const GameClass kind = s.game_class();
  out << "class=" << to_string(kind) << "\n";
  outputs["class"] = to_string(kind);

  if (kind == GameClass::kDiagonal) {
    Rng rng = make_rng(c.seed);
    const Profile start = s.resolve_profile(o.start, rng);
    if (start.operators || !start.density->is_diagonal(kDefaultPolicy.diagonal))
      throw ValidationError("--start must be a mixed-strategy (diagonal) profile");
    const AbstractGame& game = s.diagonal_game();
    const FixedPointReport report = iterate_nash_map(game, *start.density, options);
    out << "iterations=" << report.iterations << " residual=" << fmt(report.residual)
        << " delta_E=" << fmt(report.delta_E_norm)
        << " converged=" << (report.converged ? "true" : "false") << "\n";
    outputs["iterations"] = report.iterations;
    outputs["residual"] = report.residual;
    outputs["converged"] = report.converged;
    const NashCertificate cert = verify_ne(game, report.final_profile, kCertificateEps);
    out << (report.converged ? "equilibrium=1 " : "last_iterate ");
    print_certificate(out, cert);
    outputs["certificate"] = certificate_json(cert);
    if (!report.converged) {
      out << "status=not-converged\n";
      return kExitNoConvergence;
    }
    return cert.valid() ? kExitOk : kExitNoConvergence;
  }

  if (kind == GameClass::kCoDiagonalizable) {
    const auto cert = qne_commuting(s.abstract(), kDefaultPolicy.commutator, options);
    if (!cert) throw ValidationError("payoff operators do not commute");
    out << "equilibrium=1 ";
    print_certificate(out, *cert);
    outputs["certificate"] = certificate_json(*cert);
    return cert->valid() ? kExitOk : kExitNoConvergence;
  }

  // General quantum game: only the shared-top-eigenvector case is solvable.
  if (const auto top = common_max_eigenvector(s.abstract())) {
    const JointCertificate cert = verify_gne(s.abstract(), *top, kCertificateEps);
    out << "joint_equilibrium=1 epsilon=" << fmt(cert.epsilon) << " max_gain="
        << fmt(cert.max_gain()) << " valid=" << (cert.valid() ? "true" : "false") << "\n";
    for (std::size_t i = 0; i < cert.payoffs.size(); ++i)
      out << "  player=" << (i + 1) << " payoff=" << fmt(cert.payoffs[i])
          << " gain=" << fmt(cert.per_player_gain[i]) << "\n";
    out << "  state=" << fmt_matrix(top->matrix()) << "\n";
    outputs["joint_state"] = matrix_json(top->matrix());
    outputs["valid"] = cert.valid();
    return cert.valid() ? kExitOk : kExitNoConvergence;
  }
  err << "error: general (non-commuting) game without a shared top eigenvector; "
         "no solver applies\n";
  return kExitInput;
}

double parse_beta(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "infinity")
    return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double b = std::stod(text, &used);
    if (used == text.size() && b >= 0 && !std::isnan(b)) return b;
  } catch (const std::exception&) {
  }
  throw ValidationError("--beta must be a non-negative number or inf");
}

void parse_order(const std::string& text, std::size_t players, PdeConfig& cfg) {
  if (text == "round-robin") {
    cfg.order = UpdateOrder::kRoundRobin;
  } else if (text == "simultaneous") {
    cfg.order = UpdateOrder::kSimultaneous;
  } else if (text.rfind("custom:", 0) == 0) {
    cfg.order = UpdateOrder::kCustom;
    std::stringstream in(text.substr(7));
    std::string item;
    while (std::getline(in, item, ',')) {
      std::size_t used = 0;
      unsigned long v = 0;
      try {
        v = std::stoul(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.size() || used == 0 || v == 0)
        throw ValidationError("--order custom:<list> takes 1-based player numbers");
      cfg.permutation.push_back(v - 1);
    }
  } else {
    throw ValidationError("--order must be round-robin, simultaneous or custom:i,j,...");
  }
  cfg.validate(players);
}

int cmd_pde(Session& s, const Common& c, const PdeOptions& o, std::ostream& out,
            ordered_json& outputs) {
  PdeConfig cfg;
  cfg.beta = parse_beta(o.beta);
  cfg.max_steps = o.steps;
  cfg.tol = o.tol;
  cfg.cycle_window = o.cycle_window;
  cfg.thinning = o.thinning;
  cfg.quantum = o.quantum;
  parse_order(o.order, s.shape().players(), cfg);

  const bool diagonal = s.game_class() == GameClass::kDiagonal;
  if (!diagonal && !o.quantum)
    throw ValidationError("payoff operators are not diagonal; pass --quantum");
  const AbstractGame& game = diagonal ? s.diagonal_game() : s.abstract();

  Rng rng = make_rng(c.seed);
  const Profile start = s.resolve_profile(o.start, rng, !o.quantum);
  if (start.operators) throw ValidationError("--start must be a strategy-state profile");

  const PdeRun run = pde_run(game, *start.density, cfg);
  header(out, s.doc());
  out << "pattern=" << run.pattern.summary() << "\n";
  out << "steps=" << run.pattern.steps << " residual=" << fmt(run.pattern.residual) << "\n";
  const NashCertificate cert = verify_ne(game, run.final_profile, 0.0);
  out << "final ";
  print_certificate(out, cert, false);

  outputs["pattern"] = run.pattern.summary();
  outputs["steps"] = run.pattern.steps;
  outputs["residual"] = run.pattern.residual;
  outputs["final"] = certificate_json(cert);

  if (!o.csv.empty()) {
    std::ofstream file(o.csv, std::ios::binary);
    if (!file) throw ValidationError("cannot write " + o.csv);
    write_trajectory_csv(file, run.trajectory);
    out << "csv=" << o.csv << " rows=" << [&] {
      std::size_t rows = 0;
      for (const TrajectoryStep& step : run.trajectory.steps)
        for (std::size_t i = 0; i < step.profile.players(); ++i) rows += step.profile[i].dim();
      return rows;
    }() << "\n";
    outputs["csv"] = o.csv;
  }
  return kExitOk;
}

bool unitary(const ComplexMatrix& u) {
  const auto n = u.rows();
  return max_abs(u.adjoint() * u - ComplexMatrix::Identity(n, n)) <= 1e-10;
}

int cmd_quantum(Session& s, const Common& c, const QuantumOptions& o, std::ostream& out,
                ordered_json& outputs) {
  const auto* og = std::get_if<OperatorGame>(&s.doc().game);
  if (og == nullptr) throw ValidationError("quantum needs an operator game file");
  if (o.build.empty() && !o.verify) throw ValidationError("pass --build <out> and/or --verify");

  if (o.require_unitary) {
    for (const ProfileSpec& p : s.doc().profiles) {
      if (!p.operators) continue;
      for (std::size_t i = 0; i < p.states.size(); ++i)
        if (!unitary(p.states[i]))
          throw ValidationError("profiles." + p.name + "[" + std::to_string(i) +
                                "]: operator is not unitary (--require-unitary)");
    }
  }

  header(out, s.doc());
  const AbstractGame& game = s.abstract();
  int code = kExitOk;
  if (!o.build.empty()) {
    const std::string name = s.doc().name.empty() ? "abstract" : s.doc().name + "_abstract";
    std::ofstream file(o.build, std::ios::binary);
    if (!file) throw ValidationError("cannot write " + o.build);
    file << serialize_game(game, name);
    if (!file) throw ValidationError("cannot write " + o.build);
    out << "built=" << o.build << " players=" << game.players() << " dims=[";
    for (std::size_t i = 0; i < game.players(); ++i)
      out << (i > 0 ? ", " : "") << game.shape().dim(i);
    out << "] joint_dim=" << game.shape().joint_dim() << "\n";
    outputs["built"] = o.build;
    outputs["dims"] = game.shape().dims();
  }
  if (o.verify) {
    const double dev = verify_equivalence(*og, game, o.samples, c.seed, o.require_unitary);
    const bool ok = dev <= kEquivalenceThreshold;
    out << "samples=" << o.samples << " strategies=" << (o.require_unitary ? "unitary" : "general")
        << "\n";
    out << "max_deviation=" << fmt(dev) << " threshold=" << fmt(kEquivalenceThreshold)
        << " equivalent=" << (ok ? "true" : "false") << "\n";
    outputs["samples"] = o.samples;
    outputs["max_deviation"] = dev;
    outputs["equivalent"] = ok;
    if (!ok) code = kExitNoConvergence;
  }
  return code;
}

int cmd_classify(Session& s, const ClassifyOptions& o, std::ostream& out, ordered_json& outputs) {
  const Classification c = classify(s.abstract(), o.entangled);
  out << c.label() << "\n";
  outputs["class"] = to_string(c.kind);
  outputs["entangled"] = c.entangled;
  return kExitOk;
}

int self_test(const GameDocument& doc, std::ostream& out, ordered_json& outputs) {
  const std::vector<SelfTestOutcome> outcomes = run_self_test(doc);
  std::size_t failed = 0;
  auto list = ordered_json::array();
  for (const SelfTestOutcome& o : outcomes) {
    out << "self-test " << o.check << ": " << (o.passed ? "ok" : "FAIL");
    if (!o.detail.empty()) out << " (" << o.detail << ")";
    out << "\n";
    if (!o.passed) ++failed;
    list.push_back({{"check", o.check}, {"passed", o.passed}, {"detail", o.detail}});
  }
  out << "self-test passed=" << (outcomes.size() - failed) << " failed=" << failed << "\n";
  outputs["self_test"] = std::move(list);
  return failed == 0 ? kExitOk : kExitInput;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();

  CLI::App app{"Density-matrix game analysis: payoffs, equilibria, response dynamics and "
               "operator-level quantum games.",
               "densegame"};
  app.require_subcommand(1);

  Common common;
  PayoffOptions payoff;
  SolveOptions solve;
  PdeOptions pde;
  QuantumOptions quantum;
  ClassifyOptions classify_opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", common.file, "Game file (JSON)")->required();
    sub->add_flag("--self-test", common.self_test, "Run the file's self_test assertions instead");
    sub->add_option("--seed", common.seed, "Seed for every random choice")->capture_default_str();
    sub->add_option("--result", common.result, "Write a JSON run record to this path");
  };

  CLI::App* payoff_cmd = app.add_subcommand("payoff", "Evaluate every player's payoff");
  add_common(payoff_cmd);
  payoff_cmd->add_option("--profile", payoff.profile,
                         "uniform | random | pure:i,j,... | profile name from the file")
      ->capture_default_str();
  payoff_cmd->add_option("--player", payoff.player, "Only this player (1-based)");
  payoff_cmd->add_option("--path", payoff.path, "auto | classical | trace | reduced")
      ->capture_default_str();

  CLI::App* solve_cmd = app.add_subcommand("solve", "Find an equilibrium and certify it");
  add_common(solve_cmd);
  solve_cmd->add_option("--method", solve.method, "fixed-point | oracle")->capture_default_str();
  solve_cmd->add_option("--tol", solve.tol, "Fixed-point step tolerance (L1)")
      ->capture_default_str();
  solve_cmd->add_option("--max-iter", solve.max_iter, "Fixed-point iteration cap")
      ->capture_default_str();
  solve_cmd->add_option("--start", solve.start, "Starting profile")->capture_default_str();
  solve_cmd->add_option("--resolution", solve.resolution, "Oracle grid resolution (3 players)")
      ->capture_default_str();

  CLI::App* pde_cmd = app.add_subcommand("pde", "Run Boltzmann response dynamics");
  add_common(pde_cmd);
  pde_cmd->add_option("--beta", pde.beta, "Inverse temperature (number or inf)")
      ->capture_default_str();
  pde_cmd->add_option("--order", pde.order, "round-robin | simultaneous | custom:i,j,...")
      ->capture_default_str();
  pde_cmd->add_option("--steps", pde.steps, "Maximum number of steps")->capture_default_str();
  pde_cmd->add_option("--tol", pde.tol, "Convergence tolerance (L1)")->capture_default_str();
  pde_cmd->add_option("--csv", pde.csv, "Write the trajectory as CSV");
  pde_cmd->add_flag("--quantum", pde.quantum, "Allow non-diagonal payoff operators");
  pde_cmd->add_option("--cycle-window", pde.cycle_window, "States kept for cycle detection")
      ->capture_default_str();
  pde_cmd->add_option("--thinning", pde.thinning, "Record every k-th step")->capture_default_str();
  pde_cmd->add_option("--start", pde.start, "Starting profile")->capture_default_str();

  CLI::App* quantum_cmd =
      app.add_subcommand("quantum", "Compile or check an operator-level quantum game");
  add_common(quantum_cmd);
  quantum_cmd->add_option("--build", quantum.build, "Write the compiled abstract game here");
  quantum_cmd->add_flag("--verify", quantum.verify,
                        "Compare operator-level and compiled payoffs on random strategies");
  quantum_cmd->add_option("--samples", quantum.samples, "Random strategy tuples for --verify")
      ->capture_default_str();
  quantum_cmd->add_flag("--require-unitary", quantum.require_unitary,
                        "Reject non-unitary strategies; --verify samples unitaries");

  CLI::App* classify_cmd = app.add_subcommand("classify", "Print the game's class");
  add_common(classify_cmd);
  classify_cmd->add_flag("--entangled", classify_opts.entangled,
                         "Annotate that joint states may be entangled");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  RunResult result;
  result.command.assign(args.begin(), args.end());
  result.seed = common.seed;

  int code = kExitInput;
  try {
    Session session(parse_game(common.file));
    if (common.self_test) {
      code = self_test(session.doc(), out, result.outputs);
    } else if (payoff_cmd->parsed()) {
      code = cmd_payoff(session, common, payoff, out, result.outputs);
    } else if (solve_cmd->parsed()) {
      code = cmd_solve(session, common, solve, out, err, result.outputs);
    } else if (pde_cmd->parsed()) {
      code = cmd_pde(session, common, pde, out, result.outputs);
    } else if (quantum_cmd->parsed()) {
      code = cmd_quantum(session, common, quantum, out, result.outputs);
    } else {
      code = cmd_classify(session, classify_opts, out, result.outputs);
    }
  } catch (const ParseError& e) {
    err << common.file << ":" << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    code = kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = kExitInput;
  }

  if (!common.result.empty()) {
    result.exit_code = code;
    result.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::ofstream file(common.result, std::ios::binary);
    if (!file) {
      err << "error: cannot write " << common.result << "\n";
      return kExitInput;
    }
    file << result.to_json().dump(2) << "\n";
  }
  return code;
}

}  // namespace densegame::cli

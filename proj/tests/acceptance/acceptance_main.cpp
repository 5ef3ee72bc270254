// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "densegame/equilibria.hpp"
#include "densegame/game_io.hpp"
#include "densegame/pde_dynamics.hpp"
#include "densegame/quantum_game.hpp"
#include "densegame/random.hpp"

using namespace densegame;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

ComplexMatrix diag(std::initializer_list<double> values) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                                        static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double v : values) m(k, k) = v, ++k;
  return m;
}

ClassicalGame matching_pennies() {
  return ClassicalGame(SpaceShape({2, 2}), {{1, -1, -1, 1}, {-1, 1, 1, -1}});
}
ClassicalGame coordination() {
  return ClassicalGame(SpaceShape({2, 2}), {{1, 0, 0, 1}, {1, 0, 0, 1}});
}
ClassicalGame prisoners_dilemma() {
  return ClassicalGame(SpaceShape({2, 2}), {{3, 0, 5, 1}, {3, 5, 0, 1}});
}

OperatorGame penny_flip() {
  const OperatorBasis b = full_operator_basis(2);
  return OperatorGame(QuantumObject{2, DensityMatrix::from_matrix(diag({1, 0}))}, {b, b},
                      JointRule::ordered_product(), {diag({1, -1}), diag({-1, 1})});
}

Verdict theorem_one() {
  Rng rng = make_rng(1001);
  std::uniform_int_distribution<std::size_t> players(2, 3), strategies(2, 4);
  double worst = 0.0;
  std::size_t cases = 0;
  for (int g = 0; g < 500; ++g) {
    std::vector<std::size_t> dims(players(rng));
    for (std::size_t& d : dims) d = strategies(rng);
    const ClassicalGame game = random_classical_game(rng, dims);
    const AbstractGame lifted = build_H_from_G(game);
    for (int k = 0; k < 10; ++k) {
      const MixedProfile p = random_mixed_profile(rng, game.shape());
      const DensityProfile rho = mixed_to_density(p);
      for (std::size_t i = 0; i < game.players(); ++i) {
        worst = std::max(worst, std::abs(payoff_classical(game, p, i) -
                                         payoff_trace(lifted, rho, i)));
        ++cases;
      }
    }
  }
  return {worst <= 1e-12, "max_dev=" + num(worst) + " cases=" + std::to_string(cases)};
}

Verdict fixed_point_soundness() {
  Rng rng = make_rng(1002);
  double worst_map = 0.0, worst_gain = 0.0;
  std::size_t equilibria = 0, converged = 0, not_converged = 0, failed = 0;
  for (int g = 0; g < 200; ++g) {
    const ClassicalGame game = random_classical_game(rng, {2, 2});
    const AbstractGame lifted = build_H_from_G(game);
    for (const NashCertificate& c : brute_force_ne(game)) {
      worst_map = std::max(worst_map, profile_distance(nash_map(lifted, c.profile), c.profile));
      ++equilibria;
    }
    const DensityProfile starts[] = {
        DensityProfile::uniform(game.shape()),
        mixed_to_density(random_mixed_profile(rng, game.shape()))};
    for (const DensityProfile& start : starts) {
      const FixedPointReport r = iterate_nash_map(lifted, start);
      if (!r.converged) {
        ++not_converged;
        continue;
      }
      ++converged;
      const NashCertificate cert = verify_ne(lifted, r.final_profile, 1e-8);
      worst_gain = std::max(worst_gain, cert.max_gain());
      if (!cert.valid()) ++failed;
    }
  }
  return {worst_map <= 1e-9 && failed == 0,
          "oracle_ne=" + std::to_string(equilibria) + " max_map_residual=" + num(worst_map) +
              " runs_converged=" + std::to_string(converged) +
              " runs_not_converged=" + std::to_string(not_converged) +
              " converged_failing_verify=" + std::to_string(failed) +
              " max_gain=" + num(worst_gain)};
}

bool near_half(const NashCertificate& c) {
  for (std::size_t i = 0; i < 2; ++i)
    for (double v : c.profile[i].probabilities())
      if (std::abs(v - 0.5) > 1e-10) return false;
  return true;
}

bool is_pure(const NashCertificate& c) {
  for (std::size_t i = 0; i < 2; ++i) {
    const auto p = c.profile[i].probabilities();
    if (std::count(p.begin(), p.end(), 1.0) != 1) return false;
  }
  return true;
}

Verdict canonical_oracle() {
  const auto mp = brute_force_ne(matching_pennies());
  const bool mp_ok = mp.size() == 1 && near_half(mp[0]);
  const auto co = brute_force_ne(coordination());
  const auto pure_count = std::count_if(co.begin(), co.end(), is_pure);
  const auto mixed_count = std::count_if(co.begin(), co.end(), near_half);
  const bool co_ok = co.size() == 3 && pure_count == 2 && mixed_count == 1;
  const auto pd = brute_force_ne(prisoners_dilemma());
  const bool pd_ok = pd.size() == 1 && is_pure(pd[0]) &&
                     pd[0].profile[0].probabilities()[1] == 1.0 &&
                     pd[0].profile[1].probabilities()[1] == 1.0;
  return {mp_ok && co_ok && pd_ok,
          "matching_pennies=" + std::to_string(mp.size()) + " coordination=" +
              std::to_string(co.size()) + " (pure " + std::to_string(pure_count) + ", mixed " +
              std::to_string(mixed_count) + ") dominant=" + std::to_string(pd.size())};
}

Verdict pde_limits() {
  const AbstractGame pd = build_H_from_G(prisoners_dilemma());
  Rng rng = make_rng(1004);

  PdeConfig cold;
  cold.beta = 0.0;
  const DensityProfile stepped =
      pde_step(pd, mixed_to_density(random_mixed_profile(rng, pd.shape())), cold);
  double uniform_dev = 0.0;
  for (const DensityMatrix& f : stepped.factors())
    uniform_dev = std::max(uniform_dev, max_abs(f.matrix() - ComplexMatrix::Identity(2, 2) / 2.0));

  PdeConfig hot;
  hot.beta = 500.0;
  hot.max_steps = 50;
  const PdeRun run = pde_run(pd, DensityProfile::uniform(pd.shape()), hot);
  const bool hot_ok = run.pattern.kind == PatternKind::kConverged &&
                      verify_ne(pd, run.final_profile, 1e-3).valid();

  std::uniform_real_distribution<double> shift(-50.0, 50.0), beta(0.0, 20.0);
  double shift_dev = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 3);
    const bool quantum = k % 2 == 1;
    ComplexMatrix h = random_hermitian(rng, n);
    if (!quantum) h = ComplexMatrix(h.diagonal().asDiagonal());
    const double c = shift(rng), b = beta(rng);
    const ComplexMatrix moved = h + c * ComplexMatrix::Identity(h.rows(), h.cols());
    shift_dev = std::max(shift_dev, max_abs(boltzmann_update(moved, b, quantum).matrix() -
                                            boltzmann_update(h, b, quantum).matrix()));
  }
  return {uniform_dev <= 1e-15 && hot_ok && shift_dev <= 1e-12,
          "beta0_dev=" + num(uniform_dev) + " beta500=" + run.pattern.summary() + " in " +
              std::to_string(run.pattern.steps) + " steps" + " shift_dev=" + num(shift_dev)};
}

Verdict master_equation() {
  Rng rng = make_rng(1005);
  std::uniform_int_distribution<std::size_t> size(2, 6);
  std::uniform_real_distribution<double> energy(-5.0, 5.0), beta(0.0, 10.0);
  double worst_component = 0.0, worst_sum = 0.0;
  for (int k = 0; k < 100; ++k) {
    std::vector<double> e(size(rng));
    for (double& v : e) v = energy(rng);
    const double b = beta(rng);
    ComplexMatrix h = ComplexMatrix::Zero(static_cast<Eigen::Index>(e.size()),
                                          static_cast<Eigen::Index>(e.size()));
    for (std::size_t j = 0; j < e.size(); ++j)
      h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = e[j];
    const std::vector<double> boltzmann = boltzmann_update(h, b).probabilities();
    const auto stationary = master_equation_rhs(boltzmann, e, b);
    const auto moving = master_equation_rhs(random_simplex_point(rng, e.size()), e, b);
    double stationary_sum = 0.0, moving_sum = 0.0;
    for (double v : stationary) {
      worst_component = std::max(worst_component, std::abs(v));
      stationary_sum += v;
    }
    for (double v : moving) moving_sum += v;
    worst_sum = std::max({worst_sum, std::abs(stationary_sum), std::abs(moving_sum)});
  }
  return {worst_component <= 1e-12 && worst_sum <= 1e-12,
          "stationary_max=" + num(worst_component) + " sum_max=" + num(worst_sum)};
}

Verdict theorem_three() {
  const OperatorGame pf = penny_flip();
  double worst = verify_equivalence(pf, build_abstract(pf), 1000, 6000);
  const double penny = worst;
  Rng rng = make_rng(1006);
  const OperatorBasis b = full_operator_basis(2);
  for (int g = 0; g < 50; ++g) {
    const OperatorGame og(QuantumObject{2, random_density_matrix(rng, 2)}, {b, b},
                          JointRule::ordered_product(),
                          {random_hermitian(rng, 2), random_hermitian(rng, 2)});
    worst = std::max(worst, verify_equivalence(og, build_abstract(og), 1000,
                                               6001 + static_cast<std::uint64_t>(g)));
  }
  return {worst <= 1e-9, "penny_flip=" + num(penny) + " max_dev=" + num(worst) + " games=51"};
}

Verdict penny_flip_scales() {
  const OperatorGame pf = penny_flip();
  const ComplexMatrix up = diag({1, 0}), down = diag({0, 1});
  const ComplexMatrix& p1 = pf.payoff_scale(0);
  const ComplexMatrix& p2 = pf.payoff_scale(1);
  const bool values = payoff_operator_level(p1, up) == 1.0 &&
                      payoff_operator_level(p1, down) == -1.0 && max_abs(p2 + p1) == 0.0;

  Rng rng = make_rng(1007);
  const AbstractGame h = build_abstract(pf);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const std::vector<ComplexMatrix> ops{random_unitary(rng, 2), random_unitary(rng, 2)};
    const auto e = operator_level_payoffs(pf, ops);
    worst = std::max(worst, std::abs(e[0] + e[1]));
    const std::vector<ComplexVector> coeffs{random_unit_vector(rng, 4), random_unit_vector(rng, 4)};
    worst = std::max(worst, std::abs(payoff_abstract(h, coeffs, 0) + payoff_abstract(h, coeffs, 1)));
  }
  return {values && worst <= 1e-12,
          std::string("up/down/negation ") + (values ? "ok" : "wrong") + " zero_sum_max=" + num(worst)};
}

Verdict commuting_qne() {
  Rng rng = make_rng(1008);
  std::size_t passed = 0;
  double worst_gain = 0.0, worst_payoff = 0.0;
  for (int g = 0; g < 50; ++g) {
    const std::vector<std::size_t> dims = g % 2 == 0 ? std::vector<std::size_t>{2, 2}
                                                     : std::vector<std::size_t>{2, 3};
    const ClassicalGame game = random_classical_game(rng, dims);
    const ComplexMatrix w = kron(random_unitary(rng, dims[0]), random_unitary(rng, dims[1]));
    const AbstractGame lifted = build_H_from_G(game);
    std::vector<ComplexMatrix> ops;
    for (const ComplexMatrix& h : lifted.payoff_operators())
      ops.push_back(w * h * w.adjoint());
    const AbstractGame conjugated(game.shape(), ops);
    const auto cert = qne_commuting(conjugated);
    if (!cert) continue;
    const NashCertificate check = verify_ne(conjugated, cert->profile, 1e-8);
    worst_gain = std::max(worst_gain, check.max_gain());
    double best = 1e300;
    for (const NashCertificate& c : brute_force_ne(game))
      best = std::min(best, std::max(std::abs(c.payoffs[0] - check.payoffs[0]),
                                     std::abs(c.payoffs[1] - check.payoffs[1])));
    worst_payoff = std::max(worst_payoff, best);
    if (check.valid() && best <= 1e-8) ++passed;
  }
  return {passed == 50, "certified=" + std::to_string(passed) + "/50 max_gain=" + num(worst_gain) +
                            " payoff_dev=" + num(worst_payoff)};
}

Verdict gqne_special_case() {
  Rng rng = make_rng(1009);
  std::size_t found = 0, certified = 0, dominated = 0;
  double worst_margin = 1e300;
  for (int g = 0; g < 20; ++g) {
    const SpaceShape s(g % 2 == 0 ? std::vector<std::size_t>{2, 2} : std::vector<std::size_t>{2, 3});
    const auto n = static_cast<Eigen::Index>(s.joint_dim());
    const ComplexVector v = random_unit_vector(rng, s.joint_dim());
    const ComplexMatrix proj = v * v.adjoint();
    const ComplexMatrix rest = ComplexMatrix::Identity(n, n) - proj;
    std::vector<ComplexMatrix> ops;
    for (std::size_t i = 0; i < 2; ++i) {
      const ComplexMatrix r = rest * random_hermitian(rng, s.joint_dim()) * rest;
      const double top = hermitian_eigen(r).values.maxCoeff() + 0.5;
      ops.push_back(top * proj + r);
    }
    const AbstractGame game(s, ops);
    const auto rho_m = common_max_eigenvector(game);
    if (!rho_m || max_abs(rho_m->matrix() - proj) > 1e-8) continue;
    ++found;
    const JointCertificate cert = verify_gne(game, *rho_m, 1e-8);
    if (cert.valid()) ++certified;
    bool ok = true;
    for (int k = 0; k < 1000; ++k) {
      const std::size_t n_joint = s.joint_dim();
      const ComplexMatrix other =
          k % 2 == 0 ? random_density_matrix(rng, n_joint).matrix()
                     : DensityMatrix::pure(random_unit_vector(rng, n_joint)).matrix();
      for (std::size_t i = 0; i < 2; ++i) {
        const double margin =
            cert.payoffs[i] - (other * game.payoff_operator(i)).trace().real();
        worst_margin = std::min(worst_margin, margin);
        if (margin < -1e-12) ok = false;
      }
    }
    if (ok) ++dominated;
  }
  return {found == 20 && certified == 20 && dominated == 20,
          "found=" + std::to_string(found) + "/20 certified=" + std::to_string(certified) +
              " dominates_random=" + std::to_string(dominated) + " min_margin=" + num(worst_margin)};
}

struct Captured {
  int status;
  std::string out;
};

Captured capture(const std::string& args) {
  const std::string cmd = std::string("\"") + DENSEGAME_BINARY + "\" " + args + " 2>&1";
  Captured c{-1, {}};
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return c;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) c.out.append(buf.data(), got);
  c.status = pclose(pipe);
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism_and_format() {
  const auto dir = std::filesystem::temp_directory_path() / "densegame_acceptance";
  std::filesystem::create_directories(dir);
  std::size_t files = 0, self_ok = 0, commands = 0, identical = 0;
  std::string mismatch;
  auto twice = [&](const std::string& args, const std::vector<std::filesystem::path>& outputs) {
    const Captured a = capture(args);
    std::vector<std::string> first;
    for (const auto& p : outputs) first.push_back(slurp(p));
    const Captured b = capture(args);
    bool same = a.status == b.status && a.out == b.out;
    for (std::size_t k = 0; k < outputs.size(); ++k) same = same && slurp(outputs[k]) == first[k];
    ++commands;
    if (same) ++identical;
    else if (mismatch.empty()) mismatch = " first_mismatch=\"" + args + "\"";
  };

  std::vector<std::filesystem::path> paths;
  for (const auto& e : std::filesystem::directory_iterator(DENSEGAME_DATA_DIR))
    if (e.path().extension() == ".json") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());

  for (const auto& path : paths) {
    ++files;
    const std::string f = "\"" + path.string() + "\"";
    GameKind kind = GameKind::kClassical;
    try {
      kind = parse_game(path).kind;
    } catch (const Error&) {
      continue;
    }
    const Captured st = capture("classify " + f + " --self-test");
    if (st.status == 0 && st.out.find("failed=0") != std::string::npos) ++self_ok;

    const auto csv = dir / (path.stem().string() + ".csv");
    twice("classify " + f, {});
    twice("payoff " + f + " --profile uniform", {});
    twice("payoff " + f + " --profile random --seed 7", {});
    twice("solve " + f + " --seed 7", {});
    if (kind == GameKind::kClassical) {
      twice("solve " + f + " --method oracle", {});
      twice("pde " + f + " --beta 3 --start random --seed 7 --csv \"" + csv.string() + "\"", {csv});
      twice("pde " + f + " --beta inf --order simultaneous --steps 40", {});
    }
    if (kind == GameKind::kOperator) {
      const auto built = dir / (path.stem().string() + ".abstract.json");
      twice("quantum " + f + " --build \"" + built.string() + "\"", {built});
      twice("quantum " + f + " --verify --samples 200 --seed 7", {});
    }
  }
  return {files == 7 && self_ok == files && identical == commands,
          "files=" + std::to_string(files) + " self_test_passed=" + std::to_string(self_ok) +
              " commands=" + std::to_string(commands) + " byte_identical=" +
              std::to_string(identical) + mismatch};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0: no runtime bound
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "classical/trace payoff equivalence", 10.0, theorem_one},
      {2, "fixed point <=> equilibrium soundness", 30.0, fixed_point_soundness},
      {3, "oracle on canonical games", 0.0, canonical_oracle},
      {4, "boltzmann limits and shift invariance", 10.0, pde_limits},
      {5, "master equation stationarity", 0.0, master_equation},
      {6, "operator/abstract payoff equivalence", 60.0, theorem_three},
      {7, "penny flip payoff scales", 0.0, penny_flip_scales},
      {8, "commuting-game equilibria", 0.0, commuting_qne},
      {9, "shared top eigenvector joint equilibrium", 0.0, gqne_special_case},
      {10, "determinism and bundled files", 0.0, determinism_and_format},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    std::string timing = "time=" + num(seconds) + "s";
    if (c.limit_seconds > 0) {
      timing += " limit=" + num(c.limit_seconds) + "s";
      if (seconds >= c.limit_seconds) v.pass = false;
    }
    if (!v.pass) ++failures;
    std::printf("criterion %2d %-42s %s  %s %s\n", c.id, c.name, v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%zu passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "support.hpp"

#include "densegame/equilibria.hpp"
#include "densegame/pde_dynamics.hpp"
#include "densegame/random.hpp"

using namespace densegame;
using namespace densegame::test;

namespace {

ClassicalGame matching_pennies() {
  return ClassicalGame(SpaceShape({2, 2}), {{1, -1, -1, 1}, {-1, 1, 1, -1}});
}
ClassicalGame prisoners_dilemma() {
  return ClassicalGame(SpaceShape({2, 2}), {{3, 0, 5, 1}, {3, 5, 0, 1}});
}
ClassicalGame coordination() {
  return ClassicalGame(SpaceShape({2, 2}), {{1, 0, 0, 1}, {1, 0, 0, 1}});
}

DensityProfile pure(const SpaceShape& s, std::vector<std::size_t> choice) {
  return mixed_to_density(MixedProfile::pure(s, choice));
}

// Max gain over every pure deviation, computed from the payoff tensor.
double gain_by_pure_deviation(const ClassicalGame& g, const MixedProfile& p, std::size_t player) {
  const double base = payoff_classical(g, p, player);
  double best = -1e300;
  for (std::size_t mu = 0; mu < g.shape().dim(player); ++mu) {
    std::vector<std::vector<double>> dev = p.data();
    std::fill(dev[player].begin(), dev[player].end(), 0.0);
    dev[player][mu] = 1.0;
    best = std::max(best, payoff_classical(g, MixedProfile(dev), player) - base);
  }
  return best;
}

}  // namespace

TEST_CASE("delta_E examples") {
  CHECK(dist(delta_E(diag({3, 1}), 3.0), diag({0, 0})) == 0.0);
  CHECK(dist(delta_E(diag({3, 1}), 2.0), diag({1, 0})) == 0.0);
  CHECK(dist(delta_E(diag({0, 0}), 0.0), diag({0, 0})) == 0.0);
  CHECK_THROWS_AS(delta_E(sigma_x(), 0.0), ValidationError);
}

TEST_CASE("nash_map examples") {
  const AbstractGame pd = build_H_from_G(prisoners_dilemma());
  const DensityProfile dd = pure(pd.shape(), {1, 1});
  CHECK(profile_distance(nash_map(pd, dd), dd) == 0.0);

  // Player 1 sees H_R = diag(3, 1) against a pure opponent; E = 2 at uniform.
  const ClassicalGame g(SpaceShape({2, 2}), {{3, 3, 1, 1}, {0, 0, 0, 0}});
  const DensityProfile out = nash_map(build_H_from_G(g), DensityProfile::uniform(g.shape()));
  CHECK(out[0].probabilities()[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(out[0].probabilities()[1] == doctest::Approx(0.25).epsilon(1e-15));

  const AbstractGame mp = build_H_from_G(matching_pennies());
  const DensityProfile u = DensityProfile::uniform(mp.shape());
  CHECK(profile_distance(nash_map(mp, u), u) < 1e-15);
}

TEST_CASE("nash_map keeps profiles valid") {
  Rng rng = make_rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const ClassicalGame g = random_classical_game(rng, {3, 2, 2});
    const DensityProfile rho = mixed_to_density(random_mixed_profile(rng, g.shape()));
    const DensityProfile out = nash_map(build_H_from_G(g), rho);
    for (const DensityMatrix& f : out.factors()) {
      const auto p = f.probabilities();
      double sum = 0.0;
      for (double v : p) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("iterate_nash_map") {
  const AbstractGame pd = build_H_from_G(prisoners_dilemma());
  const FixedPointReport at_ne = iterate_nash_map(pd, pure(pd.shape(), {1, 1}));
  CHECK(at_ne.converged);
  CHECK(at_ne.iterations == 1);
  CHECK(at_ne.residual == 0.0);

  const FixedPointReport from_uniform = iterate_nash_map(pd, DensityProfile::uniform(pd.shape()));
  if (from_uniform.converged)
    CHECK(verify_ne(pd, from_uniform.final_profile, 1e-6).valid());
  else
    CHECK(from_uniform.iterations == FixedPointOptions{}.max_iter);

  const AbstractGame mp = build_H_from_G(matching_pennies());
  const FixedPointReport mp_run = iterate_nash_map(mp, DensityProfile::uniform(mp.shape()));
  CHECK(mp_run.converged);
  CHECK(mp_run.iterations == 1);

  FixedPointOptions tight;
  tight.max_iter = 3;
  tight.polish = false;
  const ClassicalGame rps(SpaceShape({3, 3}), {{0, -1, 1, 1, 0, -1, -1, 1, 0},
                                               {0, 1, -1, -1, 0, 1, 1, -1, 0}});
  const FixedPointReport capped = iterate_nash_map(
      build_H_from_G(rps), mixed_to_density(MixedProfile({{0.6, 0.3, 0.1}, {0.2, 0.3, 0.5}})),
      tight);
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 3);
}

TEST_CASE("verify_ne examples") {
  const AbstractGame pd = build_H_from_G(prisoners_dilemma());
  CHECK(verify_ne(pd, pure(pd.shape(), {1, 1}), 0.0).valid());
  const AbstractGame mp = build_H_from_G(matching_pennies());
  CHECK(verify_ne(mp, DensityProfile::uniform(mp.shape()), 1e-12).valid());
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      const NashCertificate c = verify_ne(mp, pure(mp.shape(), {a, b}), 1e-9);
      CHECK_FALSE(c.valid());
      CHECK(c.max_gain() == doctest::Approx(2.0));
    }
  }
}

TEST_CASE("verify_ne gains match pure-deviation enumeration") {
  Rng rng = make_rng(73);
  for (int trial = 0; trial < 30; ++trial) {
    const ClassicalGame g = random_classical_game(rng, {2, 3, 2});
    const MixedProfile p = random_mixed_profile(rng, g.shape());
    const NashCertificate c = verify_ne(build_H_from_G(g), mixed_to_density(p), 0.0);
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(std::abs(c.per_player_gain[i] - gain_by_pure_deviation(g, p, i)) < 1e-12);
  }
}

TEST_CASE("random mixed deviations never beat the pure gain") {
  Rng rng = make_rng(79);
  const ClassicalGame g = random_classical_game(rng, {3, 3});
  const AbstractGame h = build_H_from_G(g);
  const MixedProfile p = random_mixed_profile(rng, g.shape());
  const NashCertificate c = verify_ne(h, mixed_to_density(p), 0.0);
  double best = -1e300;
  for (int k = 0; k < 10000; ++k) {
    std::vector<std::vector<double>> dev = p.data();
    dev[0] = random_simplex_point(rng, 3);
    best = std::max(best, payoff_classical(g, MixedProfile(dev), 0) - c.payoffs[0]);
  }
  CHECK(best <= c.per_player_gain[0] + 1e-9);
}

TEST_CASE("oracle on canonical games") {
  const auto mp = brute_force_ne(matching_pennies());
  REQUIRE(mp.size() == 1);
  for (std::size_t i = 0; i < 2; ++i)
    for (double v : mp[0].profile[i].probabilities()) CHECK(std::abs(v - 0.5) <= 1e-10);

  const auto co = brute_force_ne(coordination());
  REQUIRE(co.size() == 3);
  int pure_count = 0, mixed_count = 0;
  for (const NashCertificate& c : co) {
    const auto p = c.profile[0].probabilities();
    if (std::abs(p[0] - 0.5) <= 1e-10 && std::abs(c.profile[1].probabilities()[0] - 0.5) <= 1e-10)
      ++mixed_count;
    else if (p[0] == 1.0 || p[1] == 1.0)
      ++pure_count;
  }
  CHECK(pure_count == 2);
  CHECK(mixed_count == 1);

  const auto pd = brute_force_ne(prisoners_dilemma());
  REQUIRE(pd.size() == 1);
  CHECK(pd[0].profile[0].probabilities() == std::vector<double>{0, 1});
  CHECK(pd[0].profile[1].probabilities() == std::vector<double>{0, 1});
}

TEST_CASE("oracle output is a fixed point of nash_map and deterministic") {
  Rng rng = make_rng(83);
  for (int trial = 0; trial < 40; ++trial) {
    const ClassicalGame g = random_classical_game(rng, {2, 3});
    const AbstractGame h = build_H_from_G(g);
    const auto found = brute_force_ne(g);
    CHECK(!found.empty());
    for (const NashCertificate& c : found) {
      CHECK(c.valid());
      CHECK(profile_distance(nash_map(h, c.profile), c.profile) <= 1e-9);
    }
    const auto again = brute_force_ne(g);
    REQUIRE(again.size() == found.size());
    for (std::size_t k = 0; k < found.size(); ++k)
      CHECK(profile_distance(again[k].profile, found[k].profile) == 0.0);
  }
}

TEST_CASE("oracle grid search on a three-player game") {
  // Each player pays 3 per unit contributed and receives 2 per unit from everyone.
  std::vector<std::vector<double>> u(3, std::vector<double>(8));
  const SpaceShape s({2, 2, 2});
  for (std::size_t k = 0; k < 8; ++k) {
    const auto c = s.unflatten(k);
    const double total = static_cast<double>(c[0] + c[1] + c[2]);
    for (std::size_t i = 0; i < 3; ++i) u[i][k] = 2.0 * total - 3.0 * static_cast<double>(c[i]);
  }
  const auto found = brute_force_ne(ClassicalGame(s, u), 10);
  REQUIRE(found.size() == 1);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(found[0].profile[i].probabilities() == std::vector<double>{1, 0});
}

TEST_CASE("oracle size limits") {
  Rng rng = make_rng(89);
  CHECK_THROWS_AS(brute_force_ne(random_classical_game(rng, {5, 2})), SizeLimitError);
  CHECK_THROWS_AS(brute_force_ne(random_classical_game(rng, {2, 2, 2, 2})), SizeLimitError);
  CHECK_THROWS_AS(brute_force_ne(random_classical_game(rng, {2, 2, 2}), 51), SizeLimitError);
}

TEST_CASE("verify_gne") {
  Rng rng = make_rng(97);
  const ClassicalGame g = random_classical_game(rng, {2, 3});
  const AbstractGame h = build_H_from_G(g);
  const DensityProfile rho = random_density_profile(rng, g.shape(), false);
  const NashCertificate product = verify_ne(h, rho, 0.0);
  const JointCertificate joint = verify_gne(h, DensityMatrix::from_matrix(rho.joint()), 0.0);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(product.per_player_gain[i] - joint.per_player_gain[i]) <= 1e-12);
    CHECK(std::abs(product.payoffs[i] - joint.payoffs[i]) <= 1e-12);
  }

  const SpaceShape s({2, 2});
  const AbstractGame zero(s, {ComplexMatrix::Zero(4, 4), ComplexMatrix::Zero(4, 4)});
  CHECK(verify_gne(zero, DensityMatrix::maximally_mixed(4), 0.0).valid());
}

TEST_CASE("common_max_eigenvector") {
  Rng rng = make_rng(101);
  const SpaceShape s({2, 2});
  const ComplexMatrix shared = random_hermitian(rng, 4);
  const auto same = common_max_eigenvector(AbstractGame(s, {shared, shared}));
  REQUIRE(same.has_value());
  const HermitianEigen e = hermitian_eigen(shared);
  const ComplexVector top = e.vectors.col(3);
  CHECK(dist(same->matrix(), top * top.adjoint()) < 1e-9);

  const AbstractGame e0(s, {diag({1, 0, 0, 0}), diag({1, 0, 0, 0})});
  const auto rm = common_max_eigenvector(e0);
  REQUIRE(rm.has_value());
  CHECK(dist(rm->matrix(), diag({1, 0, 0, 0})) < 1e-12);
  CHECK(verify_gne(e0, *rm, 0.0).valid());

  const AbstractGame apart(SpaceShape({2, 1}), {diag({1, 0}), diag({0, 1})});
  CHECK_FALSE(common_max_eigenvector(apart).has_value());
}

TEST_CASE("qne_commuting") {
  Rng rng = make_rng(103);
  const ClassicalGame pd = prisoners_dilemma();
  const auto plain = qne_commuting(build_H_from_G(pd));
  REQUIRE(plain.has_value());
  CHECK(plain->valid());
  CHECK(plain->payoffs == std::vector<double>{1, 1});

  for (int trial = 0; trial < 5; ++trial) {
    const ClassicalGame g = random_classical_game(rng, {2, 3});
    const ComplexMatrix w = kron(random_unitary(rng, 2), random_unitary(rng, 3));
    const AbstractGame lifted = build_H_from_G(g);
    std::vector<ComplexMatrix> ops;
    for (const ComplexMatrix& h : lifted.payoff_operators()) ops.push_back(w * h * w.adjoint());
    const auto cert = qne_commuting(AbstractGame(g.shape(), ops));
    REQUIRE(cert.has_value());
    CHECK(verify_ne(AbstractGame(g.shape(), ops), cert->profile, 1e-8).valid());
    bool matched = false;
    for (const NashCertificate& c : brute_force_ne(g))
      matched = matched || (std::abs(c.payoffs[0] - cert->payoffs[0]) <= 1e-8 &&
                            std::abs(c.payoffs[1] - cert->payoffs[1]) <= 1e-8);
    CHECK(matched);
  }

  const SpaceShape s({2, 2});
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  const AbstractGame clash(s, {kron(sigma_x(), id), kron(sigma_z(), id)});
  CHECK_FALSE(qne_commuting(clash).has_value());
}

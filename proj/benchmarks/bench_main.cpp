#include <benchmark/benchmark.h>

#include <vector>

#include "densegame/equilibria.hpp"
#include "densegame/pde_dynamics.hpp"
#include "densegame/quantum_game.hpp"
#include "densegame/random.hpp"

namespace {

using namespace densegame;

void BM_PartialTrace(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const SpaceShape shape({d, d, d});
  Rng rng = make_rng(1);
  const ComplexMatrix m = random_hermitian(rng, shape.joint_dim());
  for (auto _ : state) benchmark::DoNotOptimize(partial_trace_keep(m, shape, 1));
}
BENCHMARK(BM_PartialTrace)->Arg(2)->Arg(3)->Arg(4);

void BM_ReducedPayoff(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  Rng rng = make_rng(2);
  const SpaceShape shape({d, d, d});
  std::vector<ComplexMatrix> ops;
  for (int i = 0; i < 3; ++i) ops.push_back(random_hermitian(rng, shape.joint_dim()));
  const AbstractGame game(shape, ops);
  const DensityProfile rho = random_density_profile(rng, shape, false);
  for (auto _ : state) benchmark::DoNotOptimize(reduced_payoff(game, rho, 0));
}
BENCHMARK(BM_ReducedPayoff)->Arg(2)->Arg(3)->Arg(4);

void BM_PayoffTrace(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  Rng rng = make_rng(3);
  const ClassicalGame g = random_classical_game(rng, {d, d, d});
  const AbstractGame h = build_H_from_G(g);
  const DensityProfile rho = mixed_to_density(random_mixed_profile(rng, g.shape()));
  for (auto _ : state) benchmark::DoNotOptimize(payoff_trace(h, rho, 0));
}
BENCHMARK(BM_PayoffTrace)->Arg(2)->Arg(4);

void BM_NashIteration(benchmark::State& state) {
  Rng rng = make_rng(4);
  const ClassicalGame g = random_classical_game(rng, {3, 3});
  const AbstractGame h = build_H_from_G(g);
  const DensityProfile start = DensityProfile::uniform(g.shape());
  FixedPointOptions options;
  options.max_iter = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(iterate_nash_map(h, start, options));
}
BENCHMARK(BM_NashIteration)->Arg(100)->Arg(1000);

void BM_PdeRun(benchmark::State& state) {
  Rng rng = make_rng(5);
  const ClassicalGame g = random_classical_game(rng, {4, 4});
  const AbstractGame h = build_H_from_G(g);
  PdeConfig cfg;
  cfg.beta = 5.0;
  cfg.max_steps = 200;
  for (auto _ : state) benchmark::DoNotOptimize(pde_run(h, DensityProfile::uniform(g.shape()), cfg));
}
BENCHMARK(BM_PdeRun);

void BM_BuildAbstract(benchmark::State& state) {
  const auto q = static_cast<std::size_t>(state.range(0));
  Rng rng = make_rng(6);
  const OperatorBasis b = full_operator_basis(q);
  const OperatorGame og(QuantumObject{q, random_density_matrix(rng, q)}, {b, b},
                        JointRule::ordered_product(),
                        {random_hermitian(rng, q), random_hermitian(rng, q)});
  for (auto _ : state) benchmark::DoNotOptimize(build_abstract(og));
}
BENCHMARK(BM_BuildAbstract)->Arg(2)->Arg(3);

void BM_SimultaneousDiagonalization(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng = make_rng(7);
  const ComplexMatrix v = random_unitary(rng, n);
  std::vector<ComplexMatrix> family;
  for (int k = 0; k < 3; ++k) {
    ComplexMatrix d = ComplexMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < d.rows(); ++j) d(j, j) = static_cast<double>((j * (k + 1)) % 3);
    family.push_back(v * d * v.adjoint());
  }
  for (auto _ : state) benchmark::DoNotOptimize(simultaneous_diagonalization(family));
}
BENCHMARK(BM_SimultaneousDiagonalization)->Arg(4)->Arg(16)->Arg(64);

void BM_Oracle(benchmark::State& state) {
  Rng rng = make_rng(8);
  const ClassicalGame g = random_classical_game(rng, {4, 4});
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_ne(g));
}
BENCHMARK(BM_Oracle);

}  // namespace

BENCHMARK_MAIN();

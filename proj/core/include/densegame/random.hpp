#pragma once

// Seeded generators for random games, profiles and operators. Everything
// draws from a caller-owned std::mt19937_64, so a seed fully determines the
// output.

#include <cstdint>
#include <random>
#include <vector>

#include "densegame/game_model.hpp"

namespace densegame {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform point on the probability simplex (Dirichlet(1, ..., 1)).
std::vector<double> random_simplex_point(Rng& rng, std::size_t n);

ClassicalGame random_classical_game(Rng& rng, std::vector<std::size_t> dims, double lo = -1.0,
                                    double hi = 1.0);
MixedProfile random_mixed_profile(Rng& rng, const SpaceShape& shape);

ComplexVector random_unit_vector(Rng& rng, std::size_t n);
// Hermitian with entries of order one (GUE-like).
ComplexMatrix random_hermitian(Rng& rng, std::size_t n);
// Haar-distributed unitary.
ComplexMatrix random_unitary(Rng& rng, std::size_t n);
// Full-rank mixed state G G^dagger / Tr(G G^dagger).
DensityMatrix random_density_matrix(Rng& rng, std::size_t n);
DensityProfile random_density_profile(Rng& rng, const SpaceShape& shape, bool diagonal);

}  // namespace densegame

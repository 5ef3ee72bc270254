#include "densegame/random.hpp"

#include <cmath>

namespace densegame {

namespace {

ComplexMatrix ginibre(Rng& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto m = static_cast<Eigen::Index>(n);
  ComplexMatrix g(m, m);
  for (Eigen::Index c = 0; c < m; ++c)
    for (Eigen::Index r = 0; r < m; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im);
    }
  return g;
}

}  // namespace

std::vector<double> random_simplex_point(Rng& rng, std::size_t n) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> p(n);
  double sum = 0.0;
  for (double& v : p) {
    v = expo(rng);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

ClassicalGame random_classical_game(Rng& rng, std::vector<std::size_t> dims, double lo,
                                    double hi) {
  SpaceShape shape(std::move(dims));
  std::uniform_real_distribution<double> uni(lo, hi);
  std::vector<std::vector<double>> g(shape.players());
  for (auto& tensor : g) {
    tensor.resize(shape.joint_dim());
    for (double& v : tensor) v = uni(rng);
  }
  return ClassicalGame(std::move(shape), std::move(g));
}

MixedProfile random_mixed_profile(Rng& rng, const SpaceShape& shape) {
  std::vector<std::vector<double>> p;
  for (std::size_t d : shape.dims()) p.push_back(random_simplex_point(rng, d));
  return MixedProfile(std::move(p));
}

ComplexVector random_unit_vector(Rng& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(k) = Complex(re, im);
  }
  return v / v.norm();
}

ComplexMatrix random_hermitian(Rng& rng, std::size_t n) {
  const ComplexMatrix g = ginibre(rng, n);
  return 0.5 * (g + g.adjoint());
}

ComplexMatrix random_unitary(Rng& rng, std::size_t n) {
  const ComplexMatrix g = ginibre(rng, n);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column phases so the distribution is Haar.
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const Complex d = r(k, k);
    const double mag = std::abs(d);
    if (mag > 0) q.col(k) *= d / mag;
  }
  return q;
}

DensityMatrix random_density_matrix(Rng& rng, std::size_t n) {
  const ComplexMatrix g = ginibre(rng, n);
  ComplexMatrix rho = g * g.adjoint();
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace().real();
  return DensityMatrix::from_matrix(std::move(rho));
}

DensityProfile random_density_profile(Rng& rng, const SpaceShape& shape, bool diagonal) {
  std::vector<DensityMatrix> f;
  for (std::size_t d : shape.dims()) {
    if (diagonal) {
      const auto p = random_simplex_point(rng, d);
      f.push_back(DensityMatrix::diagonal(p));
    } else {
      f.push_back(random_density_matrix(rng, d));
    }
  }
  return DensityProfile(std::move(f));
}

}  // namespace densegame

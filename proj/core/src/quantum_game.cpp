#include "densegame/quantum_game.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "densegame/random.hpp"

namespace densegame {

namespace {

constexpr double kBasisTolerance = 1e-12;
constexpr double kScaleHermiticity = 1e-12;
constexpr double kBuildHermiticity = 1e-10;
constexpr double kDiagonalClassTol = 1e-10;
constexpr double kCommutingClassTol = 1e-9;

std::size_t rows_of(const ComplexMatrix& m) { return static_cast<std::size_t>(m.rows()); }

void require_square(const ComplexMatrix& m, std::size_t n, const std::string& what) {
  if (rows_of(m) != n || static_cast<std::size_t>(m.cols()) != n)
    throw DimensionError(what + ": expected a " + std::to_string(n) + "x" + std::to_string(n) +
                         " matrix, got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
}

// Joint index -> per-player digits over the given radices.
std::vector<std::size_t> digits_of(std::size_t index, const std::vector<std::size_t>& radices) {
  std::vector<std::size_t> d(radices.size());
  for (std::size_t i = radices.size(); i-- > 0;) {
    d[i] = index % radices[i];
    index /= radices[i];
  }
  return d;
}

ComplexMatrix random_operator(Rng& rng, std::size_t n) {
  return random_hermitian(rng, n) + Complex(0.0, 1.0) * random_hermitian(rng, n);
}

}  // namespace

Complex operator_inner(const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    throw DimensionError("operator_inner: dimension mismatch");
  // Tr(U^dagger V) = sum_jk conj(U_jk) V_jk
  return u.conjugate().cwiseProduct(v).sum();
}

double orthonormality_defect(std::span<const ComplexMatrix> elements) {
  double defect = 0.0;
  for (std::size_t j = 0; j < elements.size(); ++j)
    for (std::size_t k = 0; k < elements.size(); ++k) {
      const Complex expected = j == k ? 1.0 : 0.0;
      defect = std::max(defect, std::abs(operator_inner(elements[j], elements[k]) - expected));
    }
  return defect;
}

OperatorBasis::OperatorBasis(std::size_t q, std::vector<ComplexMatrix> elements)
    : q_(q), elements_(std::move(elements)) {
  if (q_ == 0) throw ValidationError("operator basis: object dimension must be >= 1");
  if (elements_.empty()) throw ValidationError("operator basis: no elements");
  if (elements_.size() > q_ * q_)
    throw ValidationError("operator basis: more than Q^2 elements");
  for (const ComplexMatrix& e : elements_) {
    require_square(e, q_, "operator basis");
    require_finite(e, "operator basis element");
  }
  const double defect = orthonormality_defect(elements_);
  if (defect > kBasisTolerance)
    throw ValidationError("operator basis is not orthonormal (defect " + std::to_string(defect) +
                          ")");
}

ComplexVector OperatorBasis::expand(const ComplexMatrix& u) const {
  require_square(u, q_, "expand");
  ComplexVector c(static_cast<Eigen::Index>(elements_.size()));
  for (std::size_t k = 0; k < elements_.size(); ++k)
    c(static_cast<Eigen::Index>(k)) = operator_inner(elements_[k], u);
  return c;
}

ComplexMatrix OperatorBasis::assemble(const ComplexVector& coefficients) const {
  if (static_cast<std::size_t>(coefficients.size()) != elements_.size())
    throw DimensionError("assemble: coefficient count does not match the basis");
  ComplexMatrix u = ComplexMatrix::Zero(static_cast<Eigen::Index>(q_), static_cast<Eigen::Index>(q_));
  for (std::size_t k = 0; k < elements_.size(); ++k)
    u += coefficients(static_cast<Eigen::Index>(k)) * elements_[k];
  return u;
}

OperatorBasis full_operator_basis(std::size_t q) {
  std::vector<ComplexMatrix> elements;
  elements.reserve(q * q);
  for (std::size_t mu = 0; mu < q; ++mu)
    for (std::size_t nu = 0; nu < q; ++nu) {
      ComplexMatrix e = ComplexMatrix::Zero(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
      e(static_cast<Eigen::Index>(mu), static_cast<Eigen::Index>(nu)) = 1.0;
      elements.push_back(std::move(e));
    }
  return OperatorBasis(q, std::move(elements));
}

JointRule JointRule::ordered_product() {
  JointRule r;
  r.kind_ = Kind::kOrderedProduct;
  r.name_ = "product";
  return r;
}

JointRule JointRule::direct_product() {
  JointRule r;
  r.kind_ = Kind::kDirectProduct;
  r.name_ = "direct_product";
  return r;
}

JointRule JointRule::table(std::vector<OperatorBasis> bases, std::vector<ComplexMatrix> entries) {
  if (bases.empty()) throw ValidationError("rule table: no player bases");
  std::size_t count = 1;
  for (const OperatorBasis& b : bases) count *= b.size();
  if (entries.size() != count)
    throw ValidationError("rule table: expected " + std::to_string(count) + " entries, got " +
                          std::to_string(entries.size()));
  const Eigen::Index rows = entries.front().rows();
  for (const ComplexMatrix& e : entries) {
    if (e.rows() != rows || e.cols() != rows || rows == 0)
      throw ValidationError("rule table: entries must be square matrices of one size");
    require_finite(e, "rule table entry");
  }
  JointRule r;
  r.kind_ = Kind::kTable;
  r.name_ = "table";
  r.bases_ = std::move(bases);
  r.entries_ = std::move(entries);
  return r;
}

JointRule JointRule::custom(Map map, std::string name) {
  if (!map) throw ValidationError("custom rule: empty map");
  JointRule r;
  r.kind_ = Kind::kCustom;
  r.name_ = std::move(name);
  r.map_ = std::move(map);
  return r;
}

ComplexMatrix JointRule::apply(std::span<const ComplexMatrix> ops) const {
  if (ops.empty()) throw DimensionError("joint rule: no operators");
  switch (kind_) {
    case Kind::kOrderedProduct: {
      const std::size_t q = rows_of(ops[0]);
      for (const ComplexMatrix& u : ops) require_square(u, q, "product rule");
      ComplexMatrix out = ops[0];
      for (std::size_t i = 1; i < ops.size(); ++i) out = ops[i] * out;
      return out;
    }
    case Kind::kDirectProduct:
      for (const ComplexMatrix& u : ops) require_square(u, rows_of(u), "direct product rule");
      return kron_all(ops);
    case Kind::kTable: {
      if (ops.size() != bases_.size())
        throw DimensionError("rule table: expected " + std::to_string(bases_.size()) +
                             " operators, got " + std::to_string(ops.size()));
      std::vector<ComplexVector> coeffs;
      std::vector<std::size_t> radices;
      for (std::size_t i = 0; i < ops.size(); ++i) {
        coeffs.push_back(bases_[i].expand(ops[i]));
        radices.push_back(bases_[i].size());
      }
      ComplexMatrix out = ComplexMatrix::Zero(entries_.front().rows(), entries_.front().cols());
      for (std::size_t s = 0; s < entries_.size(); ++s) {
        const auto d = digits_of(s, radices);
        Complex w = 1.0;
        for (std::size_t i = 0; i < d.size() && w != Complex(0.0); ++i)
          w *= coeffs[i](static_cast<Eigen::Index>(d[i]));
        if (w != Complex(0.0)) out += w * entries_[s];
      }
      return out;
    }
    case Kind::kCustom:
      return map_(ops);
  }
  throw Error("joint rule: unknown kind");
}

double linearity_defect(const JointRule& rule, std::span<const std::size_t> operator_dims,
                        std::size_t trials, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal;
  double defect = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<ComplexMatrix> ops;
    for (std::size_t d : operator_dims) ops.push_back(random_operator(rng, d));
    const ComplexMatrix base = rule.apply(ops);
    for (std::size_t k = 0; k < ops.size(); ++k) {
      const Complex a(normal(rng), normal(rng));
      std::vector<ComplexMatrix> scaled = ops;
      scaled[k] *= a;
      const ComplexMatrix expected = a * base;
      const double scale = std::max(1.0, max_abs(expected));
      defect = std::max(defect, max_abs(rule.apply(scaled) - expected) / scale);
    }
  }
  return defect;
}

OperatorGame::OperatorGame(QuantumObject object, std::vector<OperatorBasis> bases, JointRule rule,
                           std::vector<ComplexMatrix> payoff_scales)
    : object_(std::move(object)),
      bases_(std::move(bases)),
      rule_(std::move(rule)),
      scales_(std::move(payoff_scales)) {
  const std::size_t q = object_.dim;
  if (q == 0) throw ValidationError("operator game: object dimension must be >= 1");
  if (bases_.empty()) throw ValidationError("operator game: no players");
  if (object_.rho0.dim() != q)
    throw DimensionError("operator game: rho0 does not match the object dimension");
  if (scales_.size() != bases_.size())
    throw ValidationError("operator game: one payoff scale per player required");

  switch (rule_.kind()) {
    case JointRule::Kind::kDirectProduct: {
      std::size_t joint = 1;
      for (const OperatorBasis& b : bases_) joint *= b.object_dim();
      if (joint != q)
        throw DimensionError("operator game: direct product of player spaces must equal the object");
      break;
    }
    case JointRule::Kind::kTable:
      if (rule_.table_bases() != bases_)
        throw ValidationError("operator game: rule table bases differ from the player bases");
      if (rows_of(rule_.table_entries().front()) != q)
        throw DimensionError("operator game: rule table entries must act on the object");
      break;
    case JointRule::Kind::kOrderedProduct:
    case JointRule::Kind::kCustom:
      for (const OperatorBasis& b : bases_)
        if (b.object_dim() != q)
          throw DimensionError("operator game: every player must act on the full object space");
      break;
  }

  for (std::size_t i = 0; i < scales_.size(); ++i) {
    const std::string what = "payoff scale of player " + std::to_string(i + 1);
    require_square(scales_[i], q, what);
    require_hermitian(scales_[i], kScaleHermiticity, what.c_str());
  }
  (void)strategy_shape();  // size cap
}

SpaceShape OperatorGame::strategy_shape() const {
  std::vector<std::size_t> dims;
  for (const OperatorBasis& b : bases_) dims.push_back(b.size());
  return SpaceShape(std::move(dims));
}

ComplexMatrix end_state(const JointRule& rule, std::span<const ComplexMatrix> ops,
                        const ComplexMatrix& rho0) {
  const ComplexMatrix l = rule.apply(ops);
  if (l.rows() != l.cols() || l.cols() != rho0.rows() || rho0.rows() != rho0.cols())
    throw DimensionError("end_state: joint operator does not act on the object");
  return l * rho0 * l.adjoint();
}

double payoff_operator_level(const ComplexMatrix& p, const ComplexMatrix& rho_q,
                             const NumericPolicy& policy) {
  if (p.rows() != rho_q.rows() || p.cols() != rho_q.cols() || p.rows() != p.cols())
    throw DimensionError("payoff_operator_level: dimension mismatch");
  require_hermitian(p, policy.hermiticity, "payoff scale");
  return real_payoff((p * rho_q).trace(), policy, "payoff_operator_level");
}

std::vector<double> operator_level_payoffs(const OperatorGame& game,
                                           std::span<const ComplexMatrix> ops,
                                           const NumericPolicy& policy) {
  if (ops.size() != game.players())
    throw DimensionError("operator_level_payoffs: one operator per player required");
  const ComplexMatrix rho_q = end_state(game.rule(), ops, game.object().rho0.matrix());
  std::vector<double> out;
  for (std::size_t i = 0; i < game.players(); ++i)
    out.push_back(payoff_operator_level(game.payoff_scale(i), rho_q, policy));
  return out;
}

AbstractGame build_abstract(const OperatorGame& game, const NumericPolicy& policy) {
  const SpaceShape shape = game.strategy_shape();
  const auto m = static_cast<Eigen::Index>(shape.joint_dim());
  const auto q = static_cast<Eigen::Index>(game.object().dim);
  const ComplexMatrix& rho0 = game.object().rho0.matrix();

  // Column S holds vec(A_S), A_S = L(B^1_{s_1}, ..., B^N_{s_N}).
  std::vector<ComplexMatrix> images;
  images.reserve(static_cast<std::size_t>(m));
  ComplexMatrix a(q * q, m);
  for (Eigen::Index s = 0; s < m; ++s) {
    const auto digits = shape.unflatten(static_cast<std::size_t>(s));
    std::vector<ComplexMatrix> ops;
    for (std::size_t i = 0; i < digits.size(); ++i) ops.push_back(game.basis(i)[digits[i]]);
    ComplexMatrix img = game.rule().apply(ops);
    if (img.rows() != q || img.cols() != q)
      throw DimensionError("build_abstract: joint rule output does not act on the object");
    a.col(s) = img.reshaped();
    images.push_back(std::move(img));
  }

  std::vector<ComplexMatrix> ops;
  for (std::size_t i = 0; i < game.players(); ++i) {
    // <Phi|H|Psi> = vec(A_Phi)^dagger vec(P A_Psi rho0) = Tr(P A_Psi rho0 A_Phi^dagger)
    ComplexMatrix k(q * q, m);
    for (Eigen::Index s = 0; s < m; ++s)
      k.col(s) = (game.payoff_scale(i) * images[static_cast<std::size_t>(s)] * rho0).reshaped();
    ComplexMatrix h = a.adjoint() * k;
    const double defect = hermiticity_defect(h);
    if (defect > kBuildHermiticity * std::max(1.0, max_abs(h)))
      throw NotHermitianError("build_abstract: payoff operator of player " +
                              std::to_string(i + 1) + " is not Hermitian (defect " +
                              std::to_string(defect) + "); check the joint rule");
    ops.push_back((h + h.adjoint()) * 0.5);
  }
  return AbstractGame(shape, std::move(ops), policy);
}

double payoff_abstract(const AbstractGame& game, std::span<const ComplexVector> coefficients,
                       std::size_t player, const NumericPolicy& policy) {
  if (coefficients.size() != game.players())
    throw DimensionError("payoff_abstract: one coefficient vector per player required");
  std::vector<ComplexMatrix> factors;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    if (static_cast<std::size_t>(coefficients[i].size()) != game.shape().dim(i))
      throw DimensionError("payoff_abstract: coefficient vector " + std::to_string(i + 1) +
                           " has the wrong length");
    factors.push_back(coefficients[i] * coefficients[i].adjoint());
  }
  return payoff_abstract(game, factors, player, policy);
}

double payoff_abstract(const AbstractGame& game, std::span<const ComplexMatrix> densities,
                       std::size_t player, const NumericPolicy& policy) {
  if (densities.size() != game.players())
    throw DimensionError("payoff_abstract: one state per player required");
  for (std::size_t i = 0; i < densities.size(); ++i)
    require_square(densities[i], game.shape().dim(i), "payoff_abstract");
  return real_payoff(trace_against_product(game.payoff_operator(player), densities), policy,
                     "payoff_abstract");
}

double verify_equivalence(const OperatorGame& og, const AbstractGame& game, std::size_t samples,
                          std::uint64_t seed, bool unitary_only, const NumericPolicy& policy) {
  if (game.shape() != og.strategy_shape())
    throw DimensionError("verify_equivalence: abstract game does not match the operator game");
  Rng rng = make_rng(seed);
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<ComplexVector> coeffs;
    std::vector<ComplexMatrix> ops;
    for (std::size_t i = 0; i < og.players(); ++i) {
      const OperatorBasis& b = og.basis(i);
      coeffs.push_back(unitary_only ? b.expand(random_unitary(rng, b.object_dim()))
                                    : random_unit_vector(rng, b.size()));
      ops.push_back(b.assemble(coeffs.back()));
    }
    const std::vector<double> direct = operator_level_payoffs(og, ops, policy);
    for (std::size_t i = 0; i < og.players(); ++i)
      worst = std::max(worst, std::abs(direct[i] - payoff_abstract(game, coeffs, i, policy)));
  }
  return worst;
}

ComplexMatrix unitary_2x2(double xi, double x, double y, double z) {
  const double norm2 = xi * xi + x * x + y * y + z * z;
  if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > 1e-10)
    throw ValidationError("unitary_2x2: xi^2 + x^2 + y^2 + z^2 must equal 1 (got " +
                          std::to_string(norm2) + ")");
  const Complex i(0.0, 1.0);
  ComplexMatrix u(2, 2);
  // xi I + i x sx + i y sy + i z sz
  u(0, 0) = xi + i * z;
  u(0, 1) = i * x + y;
  u(1, 0) = i * x - y;
  u(1, 1) = xi - i * z;
  return u;
}

std::string to_string(GameClass kind) {
  switch (kind) {
    case GameClass::kDiagonal:
      return "diagonal";
    case GameClass::kCoDiagonalizable:
      return "co-diagonalizable";
    case GameClass::kGeneral:
      break;
  }
  return "general";
}

std::string Classification::label() const {
  return entangled ? to_string(kind) + " entangled" : to_string(kind);
}

Classification classify(const AbstractGame& game, bool entangled) {
  Classification c;
  c.entangled = entangled;
  const auto& ops = game.payoff_operators();
  const bool diagonal = std::all_of(ops.begin(), ops.end(), [](const ComplexMatrix& h) {
    return off_diagonal_max(h) <= kDiagonalClassTol;
  });
  if (diagonal) {
    c.kind = GameClass::kDiagonal;
    return c;
  }
  for (std::size_t a = 0; a < ops.size(); ++a)
    for (std::size_t b = a + 1; b < ops.size(); ++b)
      if (max_abs(commutator(ops[a], ops[b])) > kCommutingClassTol) {
        c.kind = GameClass::kGeneral;
        return c;
      }
  c.kind = GameClass::kCoDiagonalizable;
  return c;
}

}  // namespace densegame

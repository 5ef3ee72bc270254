#include "session.hpp"

#include <cstdio>
#include <sstream>

namespace densegame::cli {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  std::string s = buf;
  return s == "-0" ? "0" : s;
}

std::string fmt_list(std::span<const double> values) {
  std::string s = "[";
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) s += ", ";
    s += fmt(values[k]);
  }
  return s + "]";
}

std::string fmt_matrix(const ComplexMatrix& m) {
  std::string s = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r > 0) s += ", ";
    s += "[";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) s += ", ";
      s += "[" + fmt(m(r, c).real()) + ", " + fmt(m(r, c).imag()) + "]";
    }
    s += "]";
  }
  return s + "]";
}

nlohmann::ordered_json matrix_json(const ComplexMatrix& m) {
  auto rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Session::Session(GameDocument doc) : doc_(std::move(doc)) {}

const AbstractGame& Session::abstract() {
  if (!abstract_) abstract_ = to_abstract(doc_.game);
  return *abstract_;
}

SpaceShape Session::shape() const {
  if (const auto* og = std::get_if<OperatorGame>(&doc_.game)) return og->strategy_shape();
  if (const auto* cg = std::get_if<ClassicalGame>(&doc_.game)) return cg->shape();
  return std::get<AbstractGame>(doc_.game).shape();
}

GameClass Session::game_class() {
  if (!class_) class_ = classify(abstract()).kind;
  return *class_;
}

const ClassicalGame& Session::classical() {
  if (!classical_) {
    if (const auto* cg = std::get_if<ClassicalGame>(&doc_.game))
      classical_ = *cg;
    else if (game_class() == GameClass::kDiagonal)
      classical_ = classical_from_diagonal(abstract());
    else
      throw ValidationError("game is not classical: its payoff operators are not diagonal");
  }
  return *classical_;
}

const AbstractGame& Session::diagonal_game() {
  if (!diagonal_) {
    if (doc_.kind == GameKind::kClassical || abstract().is_diagonal())
      diagonal_ = abstract();
    else
      diagonal_ = build_H_from_G(classical());
  }
  return *diagonal_;
}

Profile Session::resolve_profile(const std::string& spec, Rng& rng, bool diagonal_random) {
  const SpaceShape s = shape();
  if (spec == "uniform") return {spec, false, {}, DensityProfile::uniform(s)};
  if (spec == "random") return {spec, false, {}, random_density_profile(rng, s, diagonal_random)};
  if (spec.rfind("pure:", 0) == 0) {
    std::vector<std::size_t> choice;
    std::stringstream in(spec.substr(5));
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        std::size_t used = 0;
        const unsigned long v = std::stoul(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        choice.push_back(v);
      } catch (const std::exception&) {
        throw ValidationError("profile " + spec + ": expected comma-separated strategy indices");
      }
    }
    if (choice.size() != s.players())
      throw ValidationError("profile " + spec + ": expected one index per player");
    for (std::size_t i = 0; i < choice.size(); ++i)
      if (choice[i] >= s.dim(i))
        throw ValidationError("profile " + spec + ": index out of range for player " +
                              std::to_string(i + 1));
    return {spec, false, {}, mixed_to_density(MixedProfile::pure(s, choice))};
  }
  if (const ProfileSpec* p = doc_.find_profile(spec)) {
    if (p->operators) return {spec, true, p->states, std::nullopt};
    std::vector<DensityMatrix> factors;
    for (const ComplexMatrix& m : p->states) factors.push_back(DensityMatrix::from_matrix(m));
    return {spec, false, {}, DensityProfile(std::move(factors))};
  }
  std::string known = "uniform, random, pure:i,j,...";
  for (const ProfileSpec& p : doc_.profiles) known += ", " + p.name;
  throw ValidationError("unknown profile \"" + spec + "\" (available: " + known + ")");
}

std::vector<double> Session::payoffs(const Profile& profile, const std::string& path) {
  if (path != "auto" && path != "classical" && path != "trace" && path != "reduced")
    throw ValidationError("unknown payoff path \"" + path + "\"");
  if (profile.operators) {
    if (path != "auto")
      throw ValidationError("operator strategies are evaluated on the object; use --path auto");
    return operator_level_payoffs(std::get<OperatorGame>(doc_.game), profile.ops);
  }
  const DensityProfile& rho = *profile.density;
  const bool diagonal_profile = rho.is_diagonal(kDefaultPolicy.diagonal);
  const bool use_classical =
      path == "classical" ||
      (path == "auto" && doc_.kind == GameKind::kClassical && diagonal_profile);

  std::vector<double> out;
  if (use_classical) {
    if (!diagonal_profile)
      throw ValidationError("classical payoff path needs a diagonal (mixed-strategy) profile");
    const MixedProfile mixed = density_to_mixed(rho);
    for (std::size_t i = 0; i < mixed.players(); ++i)
      out.push_back(payoff_classical(classical(), mixed, i));
    return out;
  }
  const AbstractGame& game = abstract();
  for (std::size_t i = 0; i < game.players(); ++i) {
    if (path == "reduced")
      out.push_back(payoff_reduced(rho[i], reduced_payoff(game, rho, i)));
    else
      out.push_back(payoff_trace(game, rho, i));
  }
  return out;
}

namespace {

bool diagonal_state(const ComplexMatrix& m) { return is_diagonal(m, 1e-12); }

}  // namespace

void print_certificate(std::ostream& out, const NashCertificate& cert, bool with_verdict) {
  if (with_verdict)
    out << "epsilon=" << fmt(cert.epsilon) << " max_gain=" << fmt(cert.max_gain())
        << " valid=" << (cert.valid() ? "true" : "false") << "\n";
  else
    out << "max_gain=" << fmt(cert.max_gain()) << "\n";
  for (std::size_t i = 0; i < cert.profile.players(); ++i) {
    const DensityMatrix& rho = cert.profile[i];
    out << "  player=" << (i + 1);
    if (diagonal_state(rho.matrix()))
      out << " strategy=" << fmt_list(rho.probabilities());
    else
      out << " state=" << fmt_matrix(rho.matrix());
    out << " payoff=" << fmt(cert.payoffs[i]) << " gain=" << fmt(cert.per_player_gain[i]) << "\n";
  }
}

nlohmann::ordered_json certificate_json(const NashCertificate& cert) {
  nlohmann::ordered_json j;
  j["epsilon"] = cert.epsilon;
  j["max_gain"] = cert.max_gain();
  j["valid"] = cert.valid();
  auto players = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < cert.profile.players(); ++i) {
    nlohmann::ordered_json p;
    p["state"] = matrix_json(cert.profile[i].matrix());
    p["payoff"] = cert.payoffs[i];
    p["gain"] = cert.per_player_gain[i];
    players.push_back(std::move(p));
  }
  j["players"] = std::move(players);
  return j;
}

}  // namespace densegame::cli

#include "densegame/game_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace densegame {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ValidationError(path + ": " + message);
}

// Re-throws library errors raised while building a field's value with the
// field path prepended, keeping the error type.
template <typename F>
auto at_field(const std::string& path, F&& build) -> decltype(build()) {
  try {
    return build();
  } catch (const NotHermitianError& e) {
    throw NotHermitianError(path + ": " + e.what());
  } catch (const SizeLimitError& e) {
    throw SizeLimitError(path + ": " + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

const json& member(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing required field");
  return *it;
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t k) {
  return path + "[" + std::to_string(k) + "]";
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

std::size_t count(const json& j, const std::string& path, std::size_t min_value = 1) {
  if (!j.is_number_integer() || j.get<long long>() < static_cast<long long>(min_value))
    fail(path, "expected an integer >= " + std::to_string(min_value));
  return j.get<std::size_t>();
}

const std::string& text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get_ref<const std::string&>();
}

const json& array(const json& j, const std::string& path, std::size_t expected_size = 0) {
  if (!j.is_array()) fail(path, "expected an array");
  if (expected_size != 0 && j.size() != expected_size)
    fail(path, "expected " + std::to_string(expected_size) + " elements, got " +
                   std::to_string(j.size()));
  return j;
}

Complex complex_number(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected a complex number [re, im]");
  return {number(j[0], index(path, 0)), number(j[1], index(path, 1))};
}

ComplexMatrix matrix(const json& j, const std::string& path, std::size_t expected = 0) {
  array(j, path, expected);
  if (j.empty()) fail(path, "empty matrix");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rpath = index(path, r);
    array(j[r], rpath);
    if (r == 0) cols = j[r].size();
    if (j[r].size() != cols || cols == 0)
      fail(rpath, "rows must be non-empty and of equal length");
  }
  if (expected != 0 && cols != expected)
    fail(path, "expected " + std::to_string(expected) + " columns, got " + std::to_string(cols));
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          complex_number(j[r][c], index(index(path, r), c));
  return m;
}

ComplexVector complex_vector(const json& j, const std::string& path, std::size_t expected) {
  array(j, path, expected);
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k)
    v(static_cast<Eigen::Index>(k)) = complex_number(j[k], index(path, k));
  return v;
}

void flatten_tensor(const json& j, const std::vector<std::size_t>& dims, std::size_t level,
                    const std::string& path, std::vector<double>& out) {
  array(j, path, dims[level]);
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (level + 1 == dims.size())
      out.push_back(number(j[k], index(path, k)));
    else
      flatten_tensor(j[k], dims, level + 1, index(path, k), out);
  }
}

std::vector<std::size_t> read_dims(const json& doc, std::size_t players) {
  const json& d = array(member(doc, "dims", ""), "dims", players);
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i < d.size(); ++i) dims.push_back(count(d[i], index("dims", i)));
  return dims;
}

SpaceShape make_shape(std::vector<std::size_t> dims) {
  return at_field("dims", [&] { return SpaceShape(std::move(dims)); });
}

ClassicalGame read_classical(const json& doc, std::size_t players) {
  SpaceShape shape = make_shape(read_dims(doc, players));
  const json& p = array(member(doc, "payoffs", ""), "payoffs", players);
  std::vector<std::vector<double>> tensors(players);
  for (std::size_t i = 0; i < players; ++i) {
    tensors[i].reserve(shape.joint_dim());
    flatten_tensor(p[i], shape.dims(), 0, index("payoffs", i), tensors[i]);
  }
  return at_field("payoffs", [&] { return ClassicalGame(shape, std::move(tensors)); });
}

AbstractGame read_abstract(const json& doc, std::size_t players) {
  SpaceShape shape = make_shape(read_dims(doc, players));
  const json& p = array(member(doc, "payoff_operators", ""), "payoff_operators", players);
  std::vector<ComplexMatrix> ops;
  for (std::size_t i = 0; i < players; ++i) {
    const std::string path = index("payoff_operators", i);
    ops.push_back(matrix(p[i], path, shape.joint_dim()));
    at_field(path, [&] {
      require_hermitian(ops.back(), kDefaultPolicy.hermiticity, "payoff operator");
      return 0;
    });
  }
  return at_field("payoff_operators", [&] { return AbstractGame(shape, std::move(ops)); });
}

OperatorBasis pauli_basis(const std::string& path) {
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  ComplexMatrix id = ComplexMatrix::Identity(2, 2) * s;
  ComplexMatrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0.0, s, s, 0.0;
  sy << 0.0, -i * s, i * s, 0.0;
  sz << s, 0.0, 0.0, -s;
  return at_field(path, [&] { return OperatorBasis(2, {id, sx, sy, sz}); });
}

OperatorBasis read_basis(const json& j, const std::string& path, std::size_t q) {
  if (j.is_string()) {
    const std::string& name = j.get_ref<const std::string&>();
    if (name == "full") return full_operator_basis(q);
    if (name == "pauli") {
      if (q != 2) fail(path, "\"pauli\" basis requires a 2-dimensional space");
      return pauli_basis(path);
    }
    fail(path, "unknown basis \"" + name + "\" (expected \"full\", \"pauli\" or a list of matrices)");
  }
  array(j, path);
  if (j.empty()) fail(path, "empty basis");
  std::vector<ComplexMatrix> elements;
  for (std::size_t k = 0; k < j.size(); ++k) elements.push_back(matrix(j[k], index(path, k)));
  const auto dim = static_cast<std::size_t>(elements.front().rows());
  return at_field(path, [&] { return OperatorBasis(dim, std::move(elements)); });
}

OperatorGame read_operator(const json& doc, std::size_t players) {
  const std::string root = "operator";
  const json& op = member(doc, root, "");
  if (!op.is_object()) fail(root, "expected an object");
  for (const auto& [key, value] : op.items()) {
    static const std::set<std::string> known = {"object_dim", "rho0", "rule", "bases",
                                                "payoff_scales"};
    if (!known.contains(key)) fail(child(root, key), "unknown field");
  }

  const std::size_t q = count(member(op, "object_dim", root), child(root, "object_dim"));
  const std::string rho_path = child(root, "rho0");
  const ComplexMatrix rho0_m = matrix(member(op, "rho0", root), rho_path, q);
  QuantumObject object{q, at_field(rho_path, [&] { return DensityMatrix::from_matrix(rho0_m); })};

  const json& rule_j = member(op, "rule", root);
  const std::string rule_path = child(root, "rule");
  if (!rule_j.is_object()) fail(rule_path, "expected an object");
  const std::string& type = text(member(rule_j, "type", rule_path), child(rule_path, "type"));

  // Bases: one spec for all players, or an array with one spec per player.
  const std::string bases_path = child(root, "bases");
  std::vector<OperatorBasis> bases;
  const json bases_j = op.contains("bases") ? op["bases"] : json("full");
  std::vector<std::size_t> player_dims(players, q);
  if (type == "direct_product") {
    const std::string dpath = child(rule_path, "player_dims");
    const json& d = array(member(rule_j, "player_dims", rule_path), dpath, players);
    for (std::size_t i = 0; i < players; ++i) player_dims[i] = count(d[i], index(dpath, i));
  }
  if (bases_j.is_string()) {
    for (std::size_t i = 0; i < players; ++i)
      bases.push_back(read_basis(bases_j, bases_path, player_dims[i]));
  } else {
    array(bases_j, bases_path, players);
    for (std::size_t i = 0; i < players; ++i)
      bases.push_back(read_basis(bases_j[i], index(bases_path, i), player_dims[i]));
  }

  JointRule rule = JointRule::ordered_product();
  if (type == "product") {
    // default
  } else if (type == "direct_product") {
    rule = JointRule::direct_product();
  } else if (type == "table") {
    std::size_t entries_count = 1;
    for (const OperatorBasis& b : bases) entries_count *= b.size();
    const std::string epath = child(rule_path, "entries");
    const json& e = array(member(rule_j, "entries", rule_path), epath, entries_count);
    std::vector<ComplexMatrix> entries;
    for (std::size_t k = 0; k < e.size(); ++k) entries.push_back(matrix(e[k], index(epath, k), q));
    rule = at_field(rule_path, [&] { return JointRule::table(bases, std::move(entries)); });
  } else {
    fail(child(rule_path, "type"),
         "unknown rule \"" + type + "\" (expected product, direct_product or table)");
  }

  const std::string spath = child(root, "payoff_scales");
  const json& s = array(member(op, "payoff_scales", root), spath, players);
  std::vector<ComplexMatrix> scales;
  for (std::size_t i = 0; i < players; ++i) {
    scales.push_back(matrix(s[i], index(spath, i), q));
    at_field(index(spath, i), [&] {
      require_hermitian(scales.back(), 1e-12, "payoff scale");
      return 0;
    });
  }

  return at_field(root, [&] {
    return OperatorGame(std::move(object), std::move(bases), std::move(rule), std::move(scales));
  });
}

std::vector<std::size_t> strategy_dims(const AnyGame& game) {
  return std::visit(
      [](const auto& g) -> std::vector<std::size_t> {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, OperatorGame>)
          return g.strategy_shape().dims();
        else
          return g.shape().dims();
      },
      game);
}

ProfileSpec read_profile(const std::string& name, const json& j, const std::string& path,
                         const AnyGame& game) {
  const std::vector<std::size_t> dims = strategy_dims(game);
  const auto* og = std::get_if<OperatorGame>(&game);
  array(j, path, dims.size());
  ProfileSpec spec{name, false, {}};
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const std::string p = index(path, i);
    const json& e = j[i];
    const bool is_operator = e.is_object() && e.contains("operator");
    if (i == 0)
      spec.operators = is_operator;
    else if (is_operator != spec.operators)
      fail(p, "mixes operators and strategy states within one profile");

    if (is_operator) {
      if (og == nullptr) fail(p, "operator strategies are only valid in operator games");
      spec.states.push_back(matrix(e["operator"], child(p, "operator"), og->basis(i).object_dim()));
      continue;
    }
    if (e.is_array()) {
      std::vector<double> probs;
      array(e, p, dims[i]);
      for (std::size_t k = 0; k < e.size(); ++k) probs.push_back(number(e[k], index(p, k)));
      spec.states.push_back(at_field(p, [&] { return DensityMatrix::diagonal(probs); }).matrix());
    } else if (e.is_object() && e.contains("density")) {
      ComplexMatrix m = matrix(e["density"], child(p, "density"), dims[i]);
      spec.states.push_back(
          at_field(child(p, "density"), [&] { return DensityMatrix::from_matrix(m); }).matrix());
    } else if (e.is_object() && e.contains("amplitudes")) {
      ComplexVector v = complex_vector(e["amplitudes"], child(p, "amplitudes"), dims[i]);
      spec.states.push_back(
          at_field(child(p, "amplitudes"), [&] { return DensityMatrix::pure(v); }).matrix());
    } else {
      fail(p, "expected probabilities, {\"density\": ...}, {\"amplitudes\": ...} or "
              "{\"operator\": ...}");
    }
  }
  return spec;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t k = 0; k < end; ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

ordered_json complex_json(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json matrix_json(const ComplexMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json tensor_json(std::span<const double> flat, std::span<const std::size_t> dims) {
  ordered_json out = ordered_json::array();
  if (dims.size() == 1) {
    for (double v : flat) out.push_back(v);
    return out;
  }
  const std::size_t block = flat.size() / dims[0];
  for (std::size_t k = 0; k < dims[0]; ++k)
    out.push_back(tensor_json(flat.subspan(k * block, block), dims.subspan(1)));
  return out;
}

ordered_json header(std::string_view kind, std::string_view name, const SpaceShape& shape) {
  ordered_json doc;
  doc["format_version"] = kFormatVersion;
  doc["kind"] = kind;
  doc["name"] = name;
  doc["players"] = shape.players();
  doc["dims"] = shape.dims();
  return doc;
}

}  // namespace

std::string to_string(GameKind kind) {
  switch (kind) {
    case GameKind::kClassical:
      return "classical";
    case GameKind::kAbstract:
      return "abstract";
    case GameKind::kOperator:
      break;
  }
  return "operator";
}

const ProfileSpec* GameDocument::find_profile(std::string_view profile_name) const {
  for (const ProfileSpec& p : profiles)
    if (p.name == profile_name) return &p;
  return nullptr;
}

GameDocument parse_game_text(std::string_view source) {
  json doc;
  try {
    doc = json::parse(source.begin(), source.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(source, e.byte);
    std::string message = e.what();
    // keep only the reason: "[json.exception...] parse error at line L, column C: <reason>"
    if (const auto at = message.find("column"); at != std::string::npos)
      if (const auto pos = message.find(": ", at); pos != std::string::npos)
        message.erase(0, pos + 2);
    throw ParseError("syntax error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + message,
                     line, column);
  }
  if (!doc.is_object()) fail("<root>", "expected a JSON object");

  static const std::set<std::string> known = {
      "format_version", "kind",     "name",     "description", "players", "dims",
      "payoffs",        "payoff_operators",     "operator",    "profiles", "self_test",
      "solver"};
  for (const auto& [key, value] : doc.items())
    if (!known.contains(key)) fail(key, "unknown field");

  const json& version = member(doc, "format_version", "");
  if (!version.is_number_integer() || version.get<long long>() != kFormatVersion)
    fail("format_version", "unsupported version (expected " + std::to_string(kFormatVersion) + ")");

  const std::string& kind = text(member(doc, "kind", ""), "kind");
  const std::size_t players = count(member(doc, "players", ""), "players");
  std::string name = doc.contains("name") ? text(doc["name"], "name") : std::string();

  auto build = [&]() -> std::pair<GameKind, AnyGame> {
    if (kind == "classical") return {GameKind::kClassical, read_classical(doc, players)};
    if (kind == "abstract") return {GameKind::kAbstract, read_abstract(doc, players)};
    if (kind == "operator") {
      OperatorGame og = read_operator(doc, players);
      if (doc.contains("dims") && read_dims(doc, players) != og.strategy_shape().dims())
        fail("dims", "does not match the operator basis sizes");
      return {GameKind::kOperator, std::move(og)};
    }
    fail("kind", "unknown kind \"" + kind + "\" (expected classical, abstract or operator)");
  };
  auto [game_kind, game] = build();
  GameDocument out{std::move(name), game_kind, std::move(game), {}, {}, {}};

  if (doc.contains("profiles")) {
    const json& profiles = doc["profiles"];
    if (!profiles.is_object()) fail("profiles", "expected an object of named profiles");
    for (const auto& [key, value] : profiles.items())
      out.profiles.push_back(read_profile(key, value, child("profiles", key), out.game));
  }
  if (doc.contains("self_test")) out.self_test = array(doc["self_test"], "self_test").dump();
  if (doc.contains("solver")) {
    if (!doc["solver"].is_object()) fail("solver", "expected an object");
    out.solver = doc["solver"].dump();
  }
  return out;
}

GameDocument parse_game(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string() + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_game_text(buffer.str());
}

AbstractGame to_abstract(const AnyGame& game) {
  return std::visit(
      [](const auto& g) -> AbstractGame {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ClassicalGame>)
          return build_H_from_G(g);
        else if constexpr (std::is_same_v<T, AbstractGame>)
          return g;
        else
          return build_abstract(g);
      },
      game);
}

std::string serialize_game(const ClassicalGame& game, std::string_view name) {
  ordered_json doc = header("classical", name, game.shape());
  ordered_json payoffs = ordered_json::array();
  for (std::size_t i = 0; i < game.players(); ++i)
    payoffs.push_back(tensor_json(game.payoffs(i), game.shape().dims()));
  doc["payoffs"] = std::move(payoffs);
  return doc.dump(2) + "\n";
}

std::string serialize_game(const AbstractGame& game, std::string_view name) {
  ordered_json doc = header("abstract", name, game.shape());
  ordered_json ops = ordered_json::array();
  for (const ComplexMatrix& h : game.payoff_operators()) ops.push_back(matrix_json(h));
  doc["payoff_operators"] = std::move(ops);
  return doc.dump(2) + "\n";
}

}  // namespace densegame

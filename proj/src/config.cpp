#include "admmrate/config.hpp"

#include "admmrate/errors.hpp"
#include "admmrate/lower_bound.hpp"

#include <fstream>
#include <random>
#include <sstream>

namespace admmrate {

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const Json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<double> number_list(const Json& value, const std::string& what) {
  if (value.is_number()) return {value.get<double>()};
  if (!value.is_array()) throw ConfigError(what + ": expected a number or an array of numbers");
  std::vector<double> out;
  for (const auto& v : value) {
    if (!v.is_number()) throw ConfigError(what + ": non-numeric entry");
    out.push_back(v.get<double>());
  }
  return out;
}

Eigen::MatrixXd matrix_from_json(const Json& value, const std::string& what) {
  if (!value.is_array() || value.empty() || !value[0].is_array())
    throw ConfigError(what + ": expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(value.size());
  const auto cols = static_cast<Eigen::Index>(value[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = value[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ConfigError(what + ": rows must all have " + std::to_string(cols) + " entries");
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto& e = row[static_cast<std::size_t>(j)];
      if (!e.is_number()) throw ConfigError(what + ": non-numeric entry");
      m(i, j) = e.get<double>();
    }
  }
  return m;
}

Eigen::VectorXd vector_from_json(const Json& value, const std::string& what) {
  const std::vector<double> v = number_list(value, what);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

GridSpec parse_grid(const Json& j) {
  if (!j.is_object()) throw ConfigError("grid file: expected a JSON object");
  GridSpec g;
  if (j.contains("alpha")) g.alpha = number_list(j["alpha"], "grid alpha");
  if (j.contains("rho0")) g.rho0 = number_list(j["rho0"], "grid rho0");
  if (j.contains("kappa")) g.kappa = number_list(j["kappa"], "grid kappa");
  if (j.contains("kappa_f")) g.kappa_f = number_list(j["kappa_f"], "grid kappa_f");
  return g;
}

namespace {

double number(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError(where + ": missing numeric \"" + key + "\"");
  return j[key].get<double>();
}

double number_or(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(std::string("\"") + key + "\" must be numeric");
  return j[key].get<double>();
}

Curvature upper_curvature(const Json& j) {
  if (!j.contains("L") || j["L"].is_null()) return Curvature::unbounded();
  if (j["L"].is_string() && j["L"].get<std::string>() == "unbounded")
    return Curvature::unbounded();
  if (!j["L"].is_number()) throw ConfigError("\"L\" must be a number, null or \"unbounded\"");
  return Curvature::finite(j["L"].get<double>());
}

FunctionOracle oracle_from_json(const Json& j, Eigen::Index dim, const std::string& where) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ConfigError(where + ": expected an object with a \"type\"");
  const std::string type = j["type"].get<std::string>();
  if (type == "quadratic") {
    const Eigen::MatrixXd Q = matrix_from_json(j.at("Q"), where + ".Q");
    const Eigen::VectorXd q =
        j.contains("q") ? vector_from_json(j["q"], where + ".q") : Eigen::VectorXd::Zero(Q.rows());
    return FunctionOracle::quadratic(Q, q,
                                     SmoothnessBounds::make(number_or(j, "m", 0.0), upper_curvature(j)));
  }
  if (type == "l1") return FunctionOracle::l1(dim, number_or(j, "weight", 1.0));
  if (type == "zero") return FunctionOracle::zero(dim);
  if (type == "indicator_zero") return FunctionOracle::indicator_zero(dim);
  throw ConfigError(where + ": unknown type \"" + type +
                    "\" (quadratic, l1, zero, indicator_zero)");
}

Eigen::VectorXd optional_vector(const Json& j, const char* key, Eigen::Index n) {
  if (!j.contains(key)) return Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v = vector_from_json(j[key], key);
  if (v.size() != n)
    throw ConfigError(std::string(key) + " must have " + std::to_string(n) + " entries");
  return v;
}

void read_common(const Json& j, const ProblemInstance& inst, AdmmParams& params) {
  params.alpha = number_or(j, "alpha", 1.0);
  params.max_iters = static_cast<int>(number_or(j, "max_iters", params.max_iters));
  params.tol = number_or(j, "tol", params.tol);
  if (j.contains("rho") && j.contains("rho0"))
    throw ConfigError("give either \"rho\" or \"rho0\", not both");
  if (j.contains("rho"))
    params.rho = number(j, "rho", "problem");
  else
    params.rho = derive_params(inst, 1.0).rho_for(number_or(j, "rho0", 1.0));
}

}  // namespace

DemoSetup parse_demo(const Json& j, std::uint64_t seed) {
  if (!j.is_object()) throw ConfigError("problem: expected a JSON object");
  const std::string kind = j.value("kind", std::string("explicit"));

  try {
    if (kind == "counterexample") {
      const auto spec =
          CounterexampleSpec::make(number(j, "m", "counterexample"), number(j, "L", "counterexample"),
                                   number_or(j, "rho0", 1.0));
      ProblemInstance inst = spec.instance();
      AdmmParams params;
      params.alpha = number_or(j, "alpha", 1.0);
      params.rho = spec.rho();
      params.max_iters = static_cast<int>(number_or(j, "max_iters", 50));
      params.tol = number_or(j, "tol", 1e-300);
      const std::string direction = j.value("direction", std::string("worst"));
      if (direction != "worst" && direction != "other")
        throw ConfigError("counterexample: direction must be \"worst\" or \"other\"");
      const int dir = direction == "worst" ? spec.worst_direction() : 1 - spec.worst_direction();
      AdmmState s0 = AdmmState::zeros(inst);
      if (spec.variant == CounterexampleVariant::kRho0AtLeastOne)
        s0.z(dir) = 1.0;
      else
        s0.u(dir) = 1.0;
      return {kind, std::move(inst), params, std::move(s0), Eigen::VectorXd::Zero(4)};
    }

    if (kind == "random") {
      RandomProblemOptions o;
      o.seed = j.contains("seed") ? j["seed"].get<std::uint64_t>() : seed;
      o.n = static_cast<int>(number_or(j, "n", o.n));
      o.m = number_or(j, "m", o.m);
      o.L = number_or(j, "L", o.L);
      o.l1_weight = number_or(j, "l1_weight", o.l1_weight);
      ProblemInstance inst = random_quadratic_l1(o);
      AdmmParams params;
      read_common(j, inst, params);
      // Initial (z, u) drawn from a stream separate from the instance.
      std::mt19937_64 rng(o.seed ^ 0x9e3779b97f4a7c15ULL);
      std::normal_distribution<double> normal(0.0, number_or(j, "init_scale", 3.0));
      AdmmState s0 = AdmmState::zeros(inst);
      for (Eigen::Index i = 0; i < s0.z.size(); ++i) s0.z(i) = normal(rng);
      for (Eigen::Index i = 0; i < s0.u.size(); ++i) s0.u(i) = normal(rng);
      return {kind, std::move(inst), params, std::move(s0), std::nullopt};
    }

    if (kind == "explicit") {
      const Eigen::MatrixXd A = matrix_from_json(j.at("A"), "A");
      const Eigen::MatrixXd B = matrix_from_json(j.at("B"), "B");
      const Eigen::VectorXd c =
          j.contains("c") ? vector_from_json(j["c"], "c") : Eigen::VectorXd::Zero(A.rows());
      ProblemInstance inst(oracle_from_json(j.at("f"), A.cols(), "f"),
                           oracle_from_json(j.at("g"), B.cols(), "g"), A, B, c);
      AdmmParams params;
      read_common(j, inst, params);
      AdmmState s0{optional_vector(j, "x0", inst.p()), optional_vector(j, "z0", inst.q()),
                   optional_vector(j, "u0", inst.r()), 0};
      return {kind, std::move(inst), params, std::move(s0), std::nullopt};
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
  throw ConfigError("problem: unknown kind \"" + kind + "\" (explicit, random, counterexample)");
}

}  // namespace admmrate

#pragma once

// JSON inputs: grid files and demo problem descriptions.

#include "admmrate/admm.hpp"
#include "admmrate/problem.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace admmrate {

using Json = nlohmann::json;

// Throws ConfigError on I/O or parse failure.
Json load_json_file(const std::string& path);

// A number or an array of numbers.
std::vector<double> number_list(const Json& value, const std::string& what);
Eigen::MatrixXd matrix_from_json(const Json& value, const std::string& what);
Eigen::VectorXd vector_from_json(const Json& value, const std::string& what);

// {"alpha": [...], "rho0": [...], "kappa": [...], "kappa_f": [...]}; every
// key optional, scalars accepted.
struct GridSpec {
  std::vector<double> alpha;
  std::vector<double> rho0;
  std::vector<double> kappa;
  std::vector<double> kappa_f;
};
GridSpec parse_grid(const Json& j);

// A runnable ADMM demonstration. Problem descriptions take one of three forms
// selected by "kind":
//   "explicit"        f, g, A, B, c given literally
//   "random"          quadratic f + l1 g drawn from a seed
//   "counterexample"  the worst-case quadratic for (m, L, rho0)
// Step size comes from "rho", or from "rho0" through the derived parameters.
struct DemoSetup {
  std::string kind;
  ProblemInstance instance;
  AdmmParams params;
  AdmmState initial;
  std::optional<Eigen::VectorXd> phi_star;
};
DemoSetup parse_demo(const Json& j, std::uint64_t seed);

}  // namespace admmrate

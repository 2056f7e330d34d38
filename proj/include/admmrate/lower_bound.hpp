#pragma once

// Rate-achieving worst-case instances for ADMM, and the gradient-descent
// comparison.

#include "admmrate/admm.hpp"
#include "admmrate/problem.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace admmrate {

enum class CounterexampleVariant {
  kRho0AtLeastOne,  // A = I, g = 0, rho = rho0 sqrt(Lm); dynamics in z
  kRho0BelowOne,    // A = rho0 I, g = indicator of {0}, rho = sqrt(Lm) / rho0; dynamics in u
};

// f(x) = 0.5 x^T diag(m, L) x, B = -I, c = 0.
struct CounterexampleSpec {
  double m = 1.0;
  double L = 1.0;
  double rho0 = 1.0;
  CounterexampleVariant variant = CounterexampleVariant::kRho0AtLeastOne;

  // Picks the variant from rho0.
  static CounterexampleSpec make(double m, double L, double rho0);

  double kappa() const { return L / m; }
  double rho() const;
  ProblemInstance instance() const;
  // Index (0 for m, 1 for L) of the eigendirection with the slowest decay.
  int worst_direction() const;
};

// Diagonal entries of the linear iteration on the active variable (z for
// rho0 >= 1, u for rho0 < 1), in the order (m-direction, L-direction).
std::array<double, 2> counterexample_multipliers(const CounterexampleSpec& spec, double alpha);

// Multiplier along the worst-case direction; equals
// 1 - alpha / (1 + chi(rho0) sqrt(kappa)).
double counterexample_rate(const CounterexampleSpec& spec, double alpha);

struct LowerBoundReport {
  double observed = 0.0;
  double counterexample_rate = 0.0;  // along the direction actually excited
  std::optional<double> formula;     // closed-form tau, when alpha <= 2
  bool worst_direction = true;
  bool matches = false;              // observed within tol of both values
  std::string note;
};

struct LowerBoundOptions {
  int iterations = 50;
  int window = 20;
  double tol = 1e-6;
  bool worst_direction = true;  // excite the slow direction, else the other one
};

LowerBoundReport verify_lower_bound(const CounterexampleSpec& spec, double alpha,
                                    const LowerBoundOptions& options = {});

struct GdSetting {
  double m_F = 1.0;
  double L_F = 1.0;
  double beta = 1.0;

  static GdSetting optimal(double m_F, double L_F);  // beta = 2 / (L_F + m_F)
  double kappa_F() const { return L_F / m_F; }
};

// inf_beta sup tau_GD = 1 - 2 / (1 + kappa_F).
double gd_optimal_rate(double kappa_F);

// Errors ||x_t|| of x+ = x - beta diag(m_F, L_F) x from x0 = (1, 1).
std::vector<double> simulate_gd(const GdSetting& setting, int iterations);

// Observed rate of the simulation; 0 when the iterate vanishes in one step.
double gd_witness_rate(const GdSetting& setting, int iterations = 50, int window = 20);

struct GdComparison {
  double kappa = 1.0;
  double kappa_F = 1.0;
  double tau_admm = 0.0;  // 1 - 2 / (1 + sqrt(kappa))
  double tau_gd = 0.0;    // 1 - 2 / (1 + kappa_F)
  double more_spec_lhs = 0.0;  // tau_gd
  double more_spec_rhs = 0.0;  // 2 tau_admm / (1 + tau_admm^2)
  double slack = 0.0;          // lhs - rhs
  bool admm_not_slower = false;
  bool inequality_holds = false;
};

inline constexpr double kComparisonSlack = 1e-12;

// Requires kappa_F >= kappa >= 1.
GdComparison admm_vs_gd(double kappa, double kappa_F);

inline constexpr const char* kCompareCsvHeader =
    "kappa,kappa_F,tau_admm,tau_gd,more_spec_lhs,more_spec_rhs,slack";
void write_compare_csv(std::ostream& os, const std::vector<GdComparison>& rows);

}  // namespace admmrate

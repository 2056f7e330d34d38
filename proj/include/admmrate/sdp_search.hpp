#pragma once

// Numerical route to the smallest certifiable contraction factor: a
// feasibility solver specialised to the 4x4 rate LMI, bisection on tau, the
// alpha > 2 frontier scan and grid sweeps.

#include "admmrate/linalg.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace admmrate {

// Decision vector v = (P11, P12, P22, lambda1, lambda2).
using DecisionVector = std::array<double, 5>;

// The LMI at fixed (alpha, rho0, kappa, tau) as M(v) = base + sum_i v_i
// coeffs[i]. The LMI is homogeneous in v, so `base` is zero; it is kept so
// the pencil form is explicit.
struct LmiPencil {
  double alpha = 0.0;
  double rho0 = 0.0;
  double kappa = 0.0;
  double tau = 0.0;
  Mat4 base;
  std::array<Mat4, 5> coeffs;

  static LmiPencil make(double alpha, double rho0, double kappa, double tau);
  Mat4 evaluate(const DecisionVector& v) const;
};

enum class FeasibilityStatus { kFeasible, kInfeasible, kInconclusive };
const char* to_string(FeasibilityStatus s);

struct SolverOptions {
  // Feasible when lambda_max(M(v)) <= tolerance * ||M(v)||; infeasible when a
  // dual lower bound exceeds 10x that.
  double tolerance = 1e-9;
  int max_iterations = 50000;
  // P >= p_floor * I on the trace(P) = 2 slice.
  double p_floor = 1e-6;
};

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::kInconclusive;
  DecisionVector witness{};  // on the trace(P) = 2 slice
  // lambda_max(M(witness)) when feasible or inconclusive; the certified lower
  // bound on min lambda_max when infeasible.
  double certified_lambda_max = 0.0;
  int iterations = 0;
};

FeasibilityResult solve_feasibility(const LmiPencil& pencil,
                                    const SolverOptions& options = {},
                                    const std::optional<DecisionVector>& seed = {});

// Rescales v onto the trace(P) = 2 slice. Throws DomainError when trace(P) <= 0.
DecisionVector normalize_witness(const DecisionVector& v);

struct BisectionOptions {
  double bisect_tol = 1e-5;
  double lower = 1e-4;
  double upper = 1.0 - 1e-6;
  int spot_checks = 2;  // extra probes above the result guarding monotonicity
  SolverOptions solver;
};

struct ProbeRecord {
  double tau = 0.0;
  FeasibilityStatus status = FeasibilityStatus::kInconclusive;
  double value = 0.0;  // certified_lambda_max of the probe
  int iterations = 0;
};

struct MinimalTauResult {
  double tau = 0.0;  // midpoint of the final bracket
  double lower = 0.0;
  double upper = 0.0;  // always a certified-feasible tau
  DecisionVector witness{};  // feasible point at `upper`
  std::vector<ProbeRecord> trace;
  int inconclusive_probes = 0;
  bool monotonicity_ok = true;
};

// Bisection for the smallest tau in (lower, upper) with a feasible LMI. Each
// probe is warm-started from the latest feasible witness. Throws SearchError
// when no probe can be certified feasible.
MinimalTauResult minimal_tau(double alpha, double rho0, double kappa,
                             const BisectionOptions& options = {});

struct FrontierPoint {
  double kappa = 0.0;
  bool feasible = false;       // some tau < 1 certified
  std::optional<double> tau;   // minimal tau when feasible
  std::string status;          // "feasible", "infeasible-at-all-tau<1", ...
};

struct FrontierResult {
  double alpha = 0.0;
  double rho0 = 0.0;
  std::vector<FrontierPoint> points;
  std::optional<double> largest_feasible_kappa;  // on the grid
  std::optional<double> kappa_star;  // refined boundary of the feasible range
  bool interval_ok = true;  // feasible grid points form a prefix of the grid
};

// Scans kappa_grid (sorted ascending) at alpha >= 2. When the feasible set
// ends inside the grid, the boundary kappa* is refined by bisection on kappa
// to `kappa_tol` relative accuracy.
FrontierResult feasibility_frontier(double alpha, double rho0,
                                    const std::vector<double>& kappa_grid,
                                    const BisectionOptions& options = {},
                                    unsigned workers = 0, double kappa_tol = 1e-3);

struct SweepRow {
  double alpha = 0.0;
  double rho0 = 0.0;
  double kappa = 0.0;
  std::optional<double> tau_formula;
  std::optional<double> tau_bisect;
  std::optional<double> lambda1;
  std::optional<double> lambda2;
  std::optional<double> lambda_max;  // at the closed-form certificate
  std::string status = "ok";  // "ok" or notes, e.g. inconclusive probe counts
  bool failed = false;         // an error, a non-monotone probe or an infeasible certificate
};

struct SweepOptions {
  BisectionOptions bisection;
  double feasibility_tol = 1e-9;
  unsigned workers = 0;
};

// Row-major over (alpha, rho0, kappa). Per-cell failures are recorded in the
// status column; the sweep continues.
std::vector<SweepRow> sweep(const std::vector<double>& alphas,
                            const std::vector<double>& rho0s,
                            const std::vector<double>& kappas,
                            const SweepOptions& options = {});

inline constexpr const char* kSweepCsvHeader =
    "alpha,rho0,kappa,tau_formula,tau_bisect,lambda1,lambda2,lambda_max,status";
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// Largest |tau_formula - tau_bisect| over rows carrying both values.
std::optional<double> max_discrepancy(const std::vector<SweepRow>& rows);

inline constexpr const char* kFrontierCsvHeader = "alpha,rho0,kappa,feasible,tau,status";
void write_frontier_csv(std::ostream& os, const FrontierResult& result);

}  // namespace admmrate

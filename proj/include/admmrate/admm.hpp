#pragma once

// Over-relaxed ADMM:
//   x+ = argmin_x f(x) + rho/2 ||Ax + Bz - c + u||^2
//   z+ = argmin_z g(z) + rho/2 ||alpha Ax+ - (1 - alpha) Bz + Bz' - alpha c + u||^2
//   u+ = u + alpha Ax+ - (1 - alpha) Bz + Bz+ - alpha c

#include "admmrate/problem.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace admmrate {

struct AdmmParams {
  double alpha = 1.0;
  double rho = 1.0;
  int max_iters = 10000;
  double tol = 1e-10;  // on ||phi_{t+1} - phi_t||, phi = (z, u)

  void validate() const;
};

struct AdmmState {
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  Eigen::VectorXd u;
  int iteration = 0;

  static AdmmState zeros(const ProblemInstance& instance);
  Eigen::VectorXd phi() const;  // stacked (z, u)
};

struct InnerSolverOptions {
  double tol = 1e-12;
  int max_iters = 200;
};

// Holds the factorizations reused across iterations. Construction checks
// that the proximal sub-problems are solvable in closed form or by the
// damped-Newton fallback.
class AdmmStepper {
 public:
  AdmmStepper(const ProblemInstance& instance, const AdmmParams& params,
              InnerSolverOptions inner = {});
  ~AdmmStepper();
  AdmmStepper(AdmmStepper&&) noexcept;
  AdmmStepper& operator=(AdmmStepper&&) noexcept;

  AdmmState step(const AdmmState& state) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One iteration; builds the sub-solvers from scratch.
AdmmState admm_step(const ProblemInstance& instance, const AdmmParams& params,
                    const AdmmState& state);

struct Trajectory {
  std::vector<AdmmState> states;      // states[0] is the initial state
  Eigen::VectorXd phi_star;
  bool phi_star_supplied = false;
  bool phi_star_converged = true;     // estimate reached its tolerance
  std::vector<double> error_norms;    // ||phi_t - phi*||, one per state
  std::vector<double> residuals;      // ||phi_{t+1} - phi_t||, one per step
  bool converged = false;             // stop criterion met before max_iters
};

// Tolerance used to estimate phi* when it is not supplied.
inline constexpr double kFixedPointTolerance = 1e-13;

Trajectory run(const ProblemInstance& instance, const AdmmParams& params,
               const AdmmState& initial,
               const std::optional<Eigen::VectorXd>& phi_star = std::nullopt);

// Geometric-mean ratio of successive errors over the trailing `window`.
// Errors below 100 * eps relative to the largest error are ignored; throws
// InsufficientDataError with fewer than two usable errors.
double observed_rate(const std::vector<double>& errors, int window);
double observed_rate(const Trajectory& traj, int window);

// Columns iteration,err_norm,ratio (+ bound when provided).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::vector<double>* bound = nullptr);

}  // namespace admmrate

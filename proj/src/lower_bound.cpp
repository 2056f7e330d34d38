#include "admmrate/lower_bound.hpp"

#include "admmrate/certificate.hpp"
#include "admmrate/csv.hpp"
#include "admmrate/errors.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace admmrate {

CounterexampleSpec CounterexampleSpec::make(double m, double L, double rho0) {
  if (!(m > 0.0) || !(L >= m) || !std::isfinite(L))
    throw DomainError("counterexample: need 0 < m <= L < inf");
  if (!(rho0 > 0.0)) throw DomainError("counterexample: rho0 must be positive");
  return {m, L, rho0,
          rho0 >= 1.0 ? CounterexampleVariant::kRho0AtLeastOne
                      : CounterexampleVariant::kRho0BelowOne};
}

double CounterexampleSpec::rho() const {
  const double s = std::sqrt(L * m);
  return variant == CounterexampleVariant::kRho0AtLeastOne ? rho0 * s : s / rho0;
}

ProblemInstance CounterexampleSpec::instance() const {
  Eigen::MatrixXd Q = Eigen::Vector2d(m, L).asDiagonal();
  auto f = FunctionOracle::quadratic(Q, Eigen::VectorXd::Zero(2),
                                     SmoothnessBounds::strongly_convex(m, L));
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  if (variant == CounterexampleVariant::kRho0AtLeastOne)
    return ProblemInstance(std::move(f), FunctionOracle::zero(2), I, -I, Eigen::VectorXd::Zero(2));
  return ProblemInstance(std::move(f), FunctionOracle::indicator_zero(2), rho0 * I, -I,
                         Eigen::VectorXd::Zero(2));
}

int CounterexampleSpec::worst_direction() const {
  return variant == CounterexampleVariant::kRho0AtLeastOne ? 0 : 1;
}

std::array<double, 2> counterexample_multipliers(const CounterexampleSpec& spec, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("counterexample: alpha must be positive");
  const double rho = spec.rho();
  const std::array<double, 2> q{spec.m, spec.L};
  std::array<double, 2> out{};
  for (std::size_t i = 0; i < 2; ++i) {
    if (spec.variant == CounterexampleVariant::kRho0AtLeastOne) {
      // z+ = (I - alpha (Q + rho I)^{-1} Q) z
      out[i] = 1.0 - alpha * q[i] / (q[i] + rho);
    } else {
      // u+ = (I - alpha rho rho0^2 (Q + rho rho0^2 I)^{-1}) u
      const double s = rho * spec.rho0 * spec.rho0;
      out[i] = 1.0 - alpha * s / (q[i] + s);
    }
  }
  return out;
}

double counterexample_rate(const CounterexampleSpec& spec, double alpha) {
  return counterexample_multipliers(spec, alpha)[static_cast<std::size_t>(spec.worst_direction())];
}

LowerBoundReport verify_lower_bound(const CounterexampleSpec& spec, double alpha,
                                    const LowerBoundOptions& options) {
  const ProblemInstance inst = spec.instance();
  AdmmParams params;
  params.alpha = alpha;
  params.rho = spec.rho();
  params.max_iters = options.iterations;
  params.tol = 1e-300;

  const int worst = spec.worst_direction();
  const int dir = options.worst_direction ? worst : 1 - worst;
  AdmmState s0 = AdmmState::zeros(inst);
  if (spec.variant == CounterexampleVariant::kRho0AtLeastOne)
    s0.z(dir) = 1.0;
  else
    s0.u(dir) = 1.0;

  const Trajectory traj = run(inst, params, s0, Eigen::VectorXd::Zero(4));

  LowerBoundReport r;
  r.worst_direction = options.worst_direction;
  r.observed = observed_rate(traj, options.window);
  r.counterexample_rate =
      std::abs(counterexample_multipliers(spec, alpha)[static_cast<std::size_t>(dir)]);
  if (alpha <= 2.0) r.formula = tau_formula(alpha, spec.rho0, spec.kappa());

  r.matches = std::abs(r.observed - r.counterexample_rate) <= options.tol &&
              (!r.formula || std::abs(r.observed - *r.formula) <= options.tol);
  if (!options.worst_direction) r.note = "not worst-case direction";
  return r;
}

GdSetting GdSetting::optimal(double m_F, double L_F) {
  if (!(m_F > 0.0) || !(L_F >= m_F)) throw DomainError("GD: need 0 < m_F <= L_F");
  return {m_F, L_F, 2.0 / (L_F + m_F)};
}

double gd_optimal_rate(double kappa_F) {
  if (!(kappa_F >= 1.0)) throw DomainError("gd_optimal_rate: kappa_F must be >= 1");
  return 1.0 - 2.0 / (1.0 + kappa_F);
}

std::vector<double> simulate_gd(const GdSetting& setting, int iterations) {
  Eigen::Vector2d x(1.0, 1.0);
  const Eigen::Vector2d h(setting.m_F, setting.L_F);
  std::vector<double> errors{x.norm()};
  for (int t = 0; t < iterations; ++t) {
    x -= setting.beta * h.cwiseProduct(x);
    errors.push_back(x.norm());
  }
  return errors;
}

double gd_witness_rate(const GdSetting& setting, int iterations, int window) {
  const std::vector<double> errors = simulate_gd(setting, iterations);
  if (errors.size() > 1 && errors[1] == 0.0) return 0.0;
  return observed_rate(errors, window);
}

GdComparison admm_vs_gd(double kappa, double kappa_F) {
  if (!(kappa >= 1.0)) throw DomainError("admm_vs_gd: kappa must be >= 1");
  if (!(kappa_F >= kappa)) {
    std::ostringstream os;
    os << "admm_vs_gd: requires kappa_F >= kappa (the comparison reduces to that case), got "
       << "kappa = " << kappa << ", kappa_F = " << kappa_F;
    throw DomainError(os.str());
  }
  GdComparison c;
  c.kappa = kappa;
  c.kappa_F = kappa_F;
  c.tau_admm = 1.0 - 2.0 / (1.0 + std::sqrt(kappa));
  c.tau_gd = gd_optimal_rate(kappa_F);
  c.more_spec_lhs = c.tau_gd;
  c.more_spec_rhs = 2.0 * c.tau_admm / (1.0 + c.tau_admm * c.tau_admm);
  c.slack = c.more_spec_lhs - c.more_spec_rhs;
  c.admm_not_slower = c.tau_admm <= c.tau_gd + kComparisonSlack;
  c.inequality_holds = c.slack >= -kComparisonSlack;
  return c;
}

void write_compare_csv(std::ostream& os, const std::vector<GdComparison>& rows) {
  os << kCompareCsvHeader << '\n';
  for (const auto& r : rows)
    os << csv_number(r.kappa) << ',' << csv_number(r.kappa_F) << ',' << csv_number(r.tau_admm)
       << ',' << csv_number(r.tau_gd) << ',' << csv_number(r.more_spec_lhs) << ','
       << csv_number(r.more_spec_rhs) << ',' << csv_number(r.slack) << '\n';
}

}  // namespace admmrate

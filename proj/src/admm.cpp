#include "admmrate/admm.hpp"

#include "admmrate/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "admmrate/csv.hpp"

namespace admmrate {

void AdmmParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("ADMM: alpha must be positive");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("ADMM: rho must be positive");
  if (!(tol > 0.0)) throw DomainError("ADMM: tol must be positive");
  if (max_iters < 0) throw DomainError("ADMM: max_iters must be >= 0");
}

AdmmState AdmmState::zeros(const ProblemInstance& instance) {
  return {Eigen::VectorXd::Zero(instance.p()), Eigen::VectorXd::Zero(instance.q()),
          Eigen::VectorXd::Zero(instance.r()), 0};
}

Eigen::VectorXd AdmmState::phi() const {
  Eigen::VectorXd out(z.size() + u.size());
  out << z, u;
  return out;
}

namespace {

// argmin_v h(v) + rho/2 ||M v + w||^2 for a smooth generic h.
Eigen::VectorXd damped_newton(const GenericHint& h, const Eigen::MatrixXd& M, double rho,
                              const Eigen::VectorXd& w, Eigen::VectorXd v,
                              const InnerSolverOptions& opt) {
  const Eigen::MatrixXd MtM = M.transpose() * M;
  auto objective = [&](const Eigen::VectorXd& y) {
    return h.value(y) + 0.5 * rho * (M * y + w).squaredNorm();
  };
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it <= opt.max_iters; ++it) {
    const Eigen::VectorXd gh = h.gradient(v);
    const Eigen::VectorXd gq = rho * M.transpose() * (M * v + w);
    const Eigen::VectorXd grad = gh + gq;
    residual = grad.norm();
    const double scale = std::max(1.0, gh.norm() + gq.norm());
    if (residual <= opt.tol * scale) return v;
    if (it == opt.max_iters) break;

    Eigen::MatrixXd H = h.hessian(v) + rho * MtM;
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    double shift = 1e-12 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    while (llt.info() != Eigen::Success) {
      H.diagonal().array() += shift;
      shift *= 10.0;
      llt.compute(H);
    }
    const Eigen::VectorXd dir = -llt.solve(grad);
    const double f0 = objective(v);
    const double slope = grad.dot(dir);
    double t = 1.0;
    Eigen::VectorXd trial = v + dir;
    while (objective(trial) > f0 + 1e-4 * t * slope && t > 1e-12) {
      t *= 0.5;
      trial = v + t * dir;
    }
    if (trial == v) break;
    v = trial;
  }
  std::ostringstream os;
  os << "damped Newton prox did not reach tolerance " << opt.tol << " in " << opt.max_iters
     << " iterations (gradient norm " << residual << ")";
  throw InnerSolverError(os.str(), residual);
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t) {
  return v.unaryExpr([t](double a) { return std::copysign(std::max(std::abs(a) - t, 0.0), a); });
}

}  // namespace

struct AdmmStepper::Impl {
  enum class XKind { kQuadratic, kGeneric };
  enum class ZKind { kLeastSquares, kQuadratic, kL1, kIndicator, kGeneric };

  ProblemInstance inst;
  AdmmParams params;
  InnerSolverOptions inner;
  XKind x_kind = XKind::kQuadratic;
  ZKind z_kind = ZKind::kLeastSquares;
  Eigen::LLT<Eigen::MatrixXd> x_llt;
  Eigen::LLT<Eigen::MatrixXd> z_llt;
  double b_scale_sq = 1.0;  // s^2 when B^T B = s^2 I

  Impl(const ProblemInstance& instance, const AdmmParams& p, InnerSolverOptions in)
      : inst(instance), params(p), inner(in) {
    params.validate();
    const Eigen::MatrixXd& A = inst.A();
    const Eigen::MatrixXd& B = inst.B();
    const double rho = params.rho;

    if (const auto* qh = std::get_if<QuadraticHint>(&inst.f().hint())) {
      x_kind = XKind::kQuadratic;
      x_llt.compute(qh->Q + rho * A.transpose() * A);
      if (x_llt.info() != Eigen::Success)
        throw ConditioningError("x-update: Q + rho A^T A is not positive definite");
    } else if (std::holds_alternative<GenericHint>(inst.f().hint())) {
      x_kind = XKind::kGeneric;
    } else {
      throw DomainError("x-update: f must be quadratic or generic smooth, got " +
                        inst.f().tag());
    }

    const Eigen::MatrixXd BtB = B.transpose() * B;
    std::visit(
        [&](const auto& h) {
          using T = std::decay_t<decltype(h)>;
          if constexpr (std::is_same_v<T, ZeroHint>) {
            z_kind = ZKind::kLeastSquares;
            z_llt.compute(BtB);
            if (z_llt.info() != Eigen::Success)
              throw ConditioningError("z-update: B lacks full column rank");
          } else if constexpr (std::is_same_v<T, QuadraticHint>) {
            z_kind = ZKind::kQuadratic;
            z_llt.compute(h.Q + rho * BtB);
            if (z_llt.info() != Eigen::Success)
              throw ConditioningError("z-update: Q_g + rho B^T B is not positive definite");
          } else if constexpr (std::is_same_v<T, L1Hint>) {
            z_kind = ZKind::kL1;
            b_scale_sq = BtB.diagonal().mean();
            const double dev =
                (BtB - b_scale_sq * Eigen::MatrixXd::Identity(BtB.rows(), BtB.cols()))
                    .cwiseAbs()
                    .maxCoeff();
            if (!(b_scale_sq > 0.0) || dev > 1e-12 * b_scale_sq)
              throw DomainError(
                  "z-update: the l1 prox is closed-form only when B^T B = s^2 I");
          } else if constexpr (std::is_same_v<T, IndicatorZeroHint>) {
            z_kind = ZKind::kIndicator;
          } else {
            z_kind = ZKind::kGeneric;
          }
        },
        inst.g().hint());
  }

  Eigen::VectorXd x_update(const AdmmState& s) const {
    const Eigen::MatrixXd& A = inst.A();
    const Eigen::VectorXd v = inst.B() * s.z - inst.c() + s.u;
    if (x_kind == XKind::kQuadratic) {
      const auto& qh = std::get<QuadraticHint>(inst.f().hint());
      return x_llt.solve(-qh.q - params.rho * A.transpose() * v);
    }
    return damped_newton(std::get<GenericHint>(inst.f().hint()), A, params.rho, v, s.x, inner);
  }

  Eigen::VectorXd z_update(const Eigen::VectorXd& w, const Eigen::VectorXd& z_prev) const {
    const Eigen::MatrixXd& B = inst.B();
    switch (z_kind) {
      case ZKind::kLeastSquares:
        return z_llt.solve(-B.transpose() * w);
      case ZKind::kQuadratic: {
        const auto& qh = std::get<QuadraticHint>(inst.g().hint());
        return z_llt.solve(-qh.q - params.rho * B.transpose() * w);
      }
      case ZKind::kL1: {
        const double weight = std::get<L1Hint>(inst.g().hint()).weight;
        return soft_threshold(-B.transpose() * w / b_scale_sq,
                              weight / (params.rho * b_scale_sq));
      }
      case ZKind::kIndicator:
        return Eigen::VectorXd::Zero(B.cols());
      case ZKind::kGeneric:
        return damped_newton(std::get<GenericHint>(inst.g().hint()), B, params.rho, w, z_prev,
                             inner);
    }
    return z_prev;
  }

  AdmmState step(const AdmmState& s) const {
    if (s.x.size() != inst.p() || s.z.size() != inst.q() || s.u.size() != inst.r())
      throw DomainError("ADMM step: state dimensions do not match the problem");
    const double a = params.alpha;
    AdmmState next;
    next.x = x_update(s);
    const Eigen::VectorXd bz = inst.B() * s.z;
    const Eigen::VectorXd w = a * (inst.A() * next.x) - (1.0 - a) * bz - a * inst.c() + s.u;
    next.z = z_update(w, s.z);
    next.u = w + inst.B() * next.z;
    next.iteration = s.iteration + 1;
    return next;
  }
};

AdmmStepper::AdmmStepper(const ProblemInstance& instance, const AdmmParams& params,
                         InnerSolverOptions inner)
    : impl_(std::make_unique<Impl>(instance, params, inner)) {}
AdmmStepper::~AdmmStepper() = default;
AdmmStepper::AdmmStepper(AdmmStepper&&) noexcept = default;
AdmmStepper& AdmmStepper::operator=(AdmmStepper&&) noexcept = default;

AdmmState AdmmStepper::step(const AdmmState& state) const { return impl_->step(state); }

AdmmState admm_step(const ProblemInstance& instance, const AdmmParams& params,
                    const AdmmState& state) {
  return AdmmStepper(instance, params).step(state);
}

Trajectory run(const ProblemInstance& instance, const AdmmParams& params,
               const AdmmState& initial, const std::optional<Eigen::VectorXd>& phi_star) {
  const AdmmStepper stepper(instance, params);
  Trajectory traj;
  traj.states.push_back(initial);
  AdmmState cur = initial;
  for (int t = 0; t < params.max_iters; ++t) {
    AdmmState next = stepper.step(cur);
    const double res = (next.phi() - cur.phi()).norm();
    traj.residuals.push_back(res);
    traj.states.push_back(next);
    cur = std::move(next);
    if (res <= params.tol) {
      traj.converged = true;
      break;
    }
  }

  if (phi_star) {
    if (phi_star->size() != instance.q() + instance.r())
      throw DomainError("run: phi* must have q + r entries");
    traj.phi_star = *phi_star;
    traj.phi_star_supplied = true;
  } else {
    // Keep iterating from the last state to a tight fixed-point estimate.
    AdmmState probe = cur;
    bool done = false;
    const int cap = std::max(params.max_iters, 1000);
    for (int t = 0; t < cap && !done; ++t) {
      AdmmState next = stepper.step(probe);
      done = (next.phi() - probe.phi()).norm() <= kFixedPointTolerance;
      probe = std::move(next);
    }
    traj.phi_star = probe.phi();
    traj.phi_star_converged = done;
  }

  traj.error_norms.reserve(traj.states.size());
  for (const auto& s : traj.states) traj.error_norms.push_back((s.phi() - traj.phi_star).norm());
  return traj;
}

double observed_rate(const std::vector<double>& errors, int window) {
  if (window < 1) throw DomainError("observed_rate: window must be >= 1");
  double peak = 0.0;
  for (double e : errors) peak = std::max(peak, e);
  const double floor = 100.0 * std::numeric_limits<double>::epsilon() * peak;

  // Trailing run of usable errors.
  std::size_t end = errors.size();
  while (end > 0 && !(errors[end - 1] > floor)) --end;
  std::size_t begin = end;
  while (begin > 0 && errors[begin - 1] > floor && end - begin < static_cast<std::size_t>(window) + 1)
    --begin;
  const std::size_t n = end - begin;
  if (n < 2 || peak == 0.0)
    throw InsufficientDataError("observed_rate: fewer than two usable error values");
  const double steps = static_cast<double>(n - 1);
  return std::exp((std::log(errors[end - 1]) - std::log(errors[begin])) / steps);
}

double observed_rate(const Trajectory& traj, int window) {
  return observed_rate(traj.error_norms, window);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::vector<double>* bound) {
  os << "iteration,err_norm,ratio" << (bound ? ",bound" : "") << '\n';
  for (std::size_t t = 0; t < traj.error_norms.size(); ++t) {
    os << t << ',' << csv_number(traj.error_norms[t]) << ',';
    if (t > 0 && traj.error_norms[t - 1] > 0.0)
      os << csv_number(traj.error_norms[t] / traj.error_norms[t - 1]);
    if (bound) {
      os << ',';
      if (t < bound->size()) os << csv_number((*bound)[t]);
    }
    os << '\n';
  }
}

}  // namespace admmrate

#include "admmrate/problem.hpp"

#include "admmrate/errors.hpp"
#include "admmrate/linalg.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace admmrate {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Curvature Curvature::finite(double value) {
  if (!std::isfinite(value) || value < 0.0)
    throw DomainError("curvature bound must be finite and >= 0, got " + num(value));
  Curvature c;
  c.value_ = value;
  return c;
}

double Curvature::value() const {
  if (!value_) throw DomainError("curvature bound is unbounded");
  return *value_;
}

std::string Curvature::to_string() const { return value_ ? num(*value_) : "unbounded"; }

SmoothnessBounds SmoothnessBounds::make(double m, Curvature L) {
  if (!std::isfinite(m) || m < 0.0)
    throw DomainError("lower curvature m must be finite and >= 0, got " + num(m));
  if (L.is_finite() && m > L.value())
    throw DomainError("curvature bounds need m <= L, got m = " + num(m) + ", L = " +
                      L.to_string());
  return {m, L};
}

SmoothnessBounds SmoothnessBounds::strongly_convex(double m, double L) {
  if (!(m > 0.0)) throw DomainError("strong convexity needs m > 0, got " + num(m));
  return make(m, Curvature::finite(L));
}

FunctionOracle FunctionOracle::quadratic(Eigen::MatrixXd Q, Eigen::VectorXd q,
                                         SmoothnessBounds bounds) {
  if (Q.rows() != Q.cols()) throw DomainError("quadratic oracle: Q must be square");
  if (q.size() != Q.rows()) throw DomainError("quadratic oracle: q has the wrong length");
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DomainError("quadratic oracle: Q must be symmetric");
  const Eigen::Index n = Q.rows();
  return FunctionOracle(n, QuadraticHint{std::move(Q), std::move(q)}, bounds);
}

FunctionOracle FunctionOracle::l1(Eigen::Index dim, double weight) {
  if (!std::isfinite(weight) || weight < 0.0)
    throw DomainError("l1 oracle: weight must be finite and >= 0");
  return FunctionOracle(dim, L1Hint{weight}, SmoothnessBounds{0.0, Curvature::unbounded()});
}

FunctionOracle FunctionOracle::zero(Eigen::Index dim) {
  return FunctionOracle(dim, ZeroHint{}, SmoothnessBounds{0.0, Curvature::unbounded()});
}

FunctionOracle FunctionOracle::indicator_zero(Eigen::Index dim) {
  return FunctionOracle(dim, IndicatorZeroHint{},
                        SmoothnessBounds{0.0, Curvature::unbounded()});
}

FunctionOracle FunctionOracle::generic(Eigen::Index dim, GenericHint hint,
                                       SmoothnessBounds bounds) {
  if (!hint.value || !hint.gradient || !hint.hessian)
    throw DomainError("generic oracle: value, gradient and hessian are all required");
  return FunctionOracle(dim, std::move(hint), bounds);
}

std::string FunctionOracle::tag() const {
  return std::visit(overloaded{[](const QuadraticHint&) { return "quadratic"; },
                               [](const L1Hint&) { return "l1"; },
                               [](const ZeroHint&) { return "zero"; },
                               [](const IndicatorZeroHint&) { return "indicator_zero"; },
                               [](const GenericHint&) { return "generic"; }},
                    hint_);
}

bool FunctionOracle::smooth() const {
  return std::holds_alternative<QuadraticHint>(hint_) || std::holds_alternative<ZeroHint>(hint_) ||
         std::holds_alternative<GenericHint>(hint_);
}

void FunctionOracle::require_dim(const Eigen::VectorXd& x) const {
  if (x.size() != dim_)
    throw DomainError(tag() + " oracle: expected a vector of length " + std::to_string(dim_) +
                      ", got " + std::to_string(x.size()));
}

double FunctionOracle::evaluate(const Eigen::VectorXd& x) const {
  require_dim(x);
  return std::visit(
      overloaded{[&](const QuadraticHint& h) { return 0.5 * x.dot(h.Q * x) + h.q.dot(x); },
                 [&](const L1Hint& h) { return h.weight * x.lpNorm<1>(); },
                 [](const ZeroHint&) { return 0.0; },
                 [&](const IndicatorZeroHint&) {
                   return x.isZero(0.0) ? 0.0 : std::numeric_limits<double>::infinity();
                 },
                 [&](const GenericHint& h) { return h.value(x); }},
      hint_);
}

Eigen::VectorXd FunctionOracle::gradient(const Eigen::VectorXd& x) const {
  require_dim(x);
  if (!smooth()) throw DomainError(tag() + " oracle is not differentiable");
  return std::visit(
      overloaded{[&](const QuadraticHint& h) -> Eigen::VectorXd { return h.Q * x + h.q; },
                 [&](const GenericHint& h) -> Eigen::VectorXd { return h.gradient(x); },
                 [&](const auto&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(dim_); }},
      hint_);
}

ProblemInstance::ProblemInstance(FunctionOracle f, FunctionOracle g, Eigen::MatrixXd A,
                                 Eigen::MatrixXd B, Eigen::VectorXd c)
    : f_(std::move(f)), g_(std::move(g)), A_(std::move(A)), B_(std::move(B)), c_(std::move(c)) {
  if (A_.rows() == 0 || A_.cols() == 0 || B_.cols() == 0)
    throw DomainError("problem: A and B must be nonempty");
  if (B_.rows() != A_.rows())
    throw DomainError("problem: A is " + std::to_string(A_.rows()) + "x" +
                      std::to_string(A_.cols()) + " but B has " + std::to_string(B_.rows()) +
                      " rows");
  if (c_.size() != A_.rows()) throw DomainError("problem: c must have r entries");
  if (f_.dim() != A_.cols())
    throw DomainError("problem: f acts on R^" + std::to_string(f_.dim()) + " but A has " +
                      std::to_string(A_.cols()) + " columns");
  if (g_.dim() != B_.cols())
    throw DomainError("problem: g acts on R^" + std::to_string(g_.dim()) + " but B has " +
                      std::to_string(B_.cols()) + " columns");
  sigma_a_ = singular_values(A_);
  sigma_b_ = singular_values(B_);
}

double DerivedParams::rho_for(double rho0_target) const {
  if (!(rho0_target > 0.0)) throw DomainError("rho0 must be positive");
  return rho0_target * std::sqrt(m_hat * L_hat);
}

DerivedParams derive_params(const ProblemInstance& instance, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw DomainError("derive_params: rho must be positive, got " + num(rho));
  const auto& fb = instance.f().bounds();
  if (!(fb.m > 0.0) || !fb.L.is_finite())
    throw DomainError("derive_params: f needs bounds 0 < m <= L < inf");

  if (instance.A().rows() != instance.A().cols())
    throw ConditioningError("derive_params: A must be square to be invertible");
  const auto& sa = instance.sigma_A();
  if (!(sa.back() > kRankTolerance * sa.front()))
    throw ConditioningError("derive_params: A is singular (sigma_min = " + num(sa.back()) +
                            ", sigma_max = " + num(sa.front()) + ")");
  const auto& sb = instance.sigma_B();
  if (instance.B().rows() < instance.B().cols() ||
      !(sb.back() > kRankTolerance * sb.front()))
    throw ConditioningError("derive_params: B lacks full column rank");

  DerivedParams d;
  const double m = fb.m;
  const double L = fb.L.value();
  d.m_hat = m / (sa.front() * sa.front());
  d.L_hat = L / (sa.back() * sa.back());
  d.rho0 = rho / std::sqrt(d.m_hat * d.L_hat);
  d.kappa_f = L / m;
  d.kappa_A = sa.front() / sa.back();
  d.kappa_B = sb.front() / sb.back();
  d.kappa = d.kappa_f * d.kappa_A * d.kappa_A;
  return d;
}

bool AssumptionReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string AssumptionReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks)
    os << (c.passed ? "pass " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": ")
       << c.detail << '\n';
  return os.str();
}

namespace {

// Checks m ||x-y||^2 <= (grad h(x) - grad h(y))^T (x-y) <= L ||x-y||^2.
struct PairCheck {
  bool ok = true;
  std::optional<ViolatingPair> violation;
};

PairCheck check_pairs(const FunctionOracle& h, const char* name,
                      const ValidationOptions& opt) {
  PairCheck out;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u(-opt.sample_radius, opt.sample_radius);
  const auto& b = h.bounds();
  for (int s = 0; s < opt.samples; ++s) {
    Eigen::VectorXd x(h.dim()), y(h.dim());
    for (Eigen::Index i = 0; i < h.dim(); ++i) x(i) = u(rng);
    for (Eigen::Index i = 0; i < h.dim(); ++i) y(i) = u(rng);
    const Eigen::VectorXd d = x - y;
    const double dist_sq = d.squaredNorm();
    if (dist_sq == 0.0) continue;
    const double inner = (h.gradient(x) - h.gradient(y)).dot(d);
    const double slack = opt.rel_tol * std::max(1.0, std::abs(inner));
    const bool low = inner >= b.m * dist_sq - slack;
    const bool high = !b.L.is_finite() || inner <= b.L.value() * dist_sq + slack;
    if (!low || !high) {
      out.ok = false;
      out.violation = ViolatingPair{name, x, y, inner, dist_sq};
      return out;
    }
  }
  return out;
}

// Quadratics are checked exactly through the spectrum of Q.
AssumptionCheck check_quadratic(const QuadraticHint& h, const SmoothnessBounds& b,
                                const std::string& label, const char* name,
                                std::optional<ViolatingPair>& violation) {
  AssumptionCheck c{label, true, ""};
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.Q);
  const auto& ev = es.eigenvalues();
  const double tol = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::ostringstream os;
  os << "spectrum(Q) = [" << num(ev.minCoeff()) << ", " << num(ev.maxCoeff())
     << "], declared [" << num(b.m) << ", " << b.L.to_string() << "]";
  c.detail = os.str();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const bool low = ev(i) >= b.m - tol;
    const bool high = !b.L.is_finite() || ev(i) <= b.L.value() + tol;
    if (!low || !high) {
      c.passed = false;
      if (!violation) {
        const Eigen::VectorXd x = es.eigenvectors().col(i);
        violation = ViolatingPair{name, x, Eigen::VectorXd::Zero(x.size()), ev(i), 1.0};
      }
      break;
    }
  }
  return c;
}

AssumptionCheck check_membership(const FunctionOracle& h, const std::string& label,
                                 const char* name, const ValidationOptions& opt,
                                 std::optional<ViolatingPair>& violation) {
  if (const auto* qh = std::get_if<QuadraticHint>(&h.hint()))
    return check_quadratic(*qh, h.bounds(), label, name, violation);
  if (std::holds_alternative<GenericHint>(h.hint())) {
    const PairCheck pc = check_pairs(h, name, opt);
    AssumptionCheck c{label, pc.ok,
                      std::to_string(opt.samples) + " sampled pairs (seed " +
                          std::to_string(opt.seed) + ")"};
    if (!pc.ok && !violation) violation = pc.violation;
    if (!pc.ok) c.detail += ", violating pair found";
    return c;
  }
  // zero, l1 and the indicator of {0} are convex, closed and proper by
  // construction, and belong to S(0, inf).
  const bool ok = h.bounds().m == 0.0 && !h.bounds().L.is_finite();
  return {label, ok, h.tag() + (ok ? " is in S(0, inf)" : " must carry bounds (0, unbounded)")};
}

}  // namespace

AssumptionReport validate_assumption(const ProblemInstance& instance,
                                     const ValidationOptions& options) {
  AssumptionReport r;

  const auto& f = instance.f();
  const auto& fb = f.bounds();
  const bool f_bounds_ok = fb.m > 0.0 && fb.L.is_finite() && f.smooth();
  r.checks.push_back({"f bounds 0 < m <= L < inf", f_bounds_ok,
                      "m = " + num(fb.m) + ", L = " + fb.L.to_string() + ", tag " + f.tag()});
  if (f.smooth())
    r.checks.push_back(check_membership(f, "f in S_p(m, L)", "f", options, r.violation));

  // A smooth g is checked against its own declared bounds, which refine S(0, inf).
  r.checks.push_back(
      check_membership(instance.g(), "g in S_q(0, inf)", "g", options, r.violation));

  const auto& sa = instance.sigma_A();
  const bool a_square = instance.A().rows() == instance.A().cols();
  const bool a_ok = a_square && sa.back() > kRankTolerance * sa.front();
  r.checks.push_back({"A invertible", a_ok,
                      a_square ? "sigma in [" + num(sa.back()) + ", " + num(sa.front()) + "]"
                               : "A is not square"});
  const auto& sb = instance.sigma_B();
  const bool b_tall = instance.B().rows() >= instance.B().cols();
  const bool b_ok = b_tall && sb.back() > kRankTolerance * sb.front();
  r.checks.push_back({"B full column rank", b_ok,
                      "sigma in [" + num(sb.back()) + ", " + num(sb.front()) + "]"});
  return r;
}

namespace {

Eigen::MatrixXd random_orthogonal(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = normal(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  // Fix column signs so the factor is unique.
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

}  // namespace

ProblemInstance random_quadratic_l1(const RandomProblemOptions& o) {
  if (o.n < 2) throw DomainError("random problem: n must be >= 2");
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(o.m, o.L);

  const int n = o.n;
  Eigen::VectorXd ev(n);
  for (int i = 0; i < n; ++i) ev(i) = uniform(rng);
  ev(0) = o.m;
  ev(n - 1) = o.L;
  const Eigen::MatrixXd u = random_orthogonal(rng, n);
  Eigen::MatrixXd Q = u * ev.asDiagonal() * u.transpose();
  Q = 0.5 * (Q + Q.transpose());
  Eigen::VectorXd q(n);
  for (int i = 0; i < n; ++i) q(i) = normal(rng);

  Eigen::MatrixXd A = o.a_scale * random_orthogonal(rng, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) A(i, j) += o.a_perturbation * normal(rng);
  const Eigen::MatrixXd B = -o.b_scale * random_orthogonal(rng, n);
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) c(i) = normal(rng);

  return ProblemInstance(
      FunctionOracle::quadratic(std::move(Q), std::move(q),
                                SmoothnessBounds::strongly_convex(o.m, o.L)),
      FunctionOracle::l1(n, o.l1_weight), std::move(A), B, std::move(c));
}

}  // namespace admmrate

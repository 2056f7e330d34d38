#pragma once

// Problem model: minimize f(x) + g(z) subject to Ax + Bz = c, with curvature
// bounds, proximal hints and the derived conditioning quantities.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace admmrate {

// Upper curvature bound, possibly unbounded. Unbounded is an explicit state,
// never an infinite float.
class Curvature {
 public:
  static Curvature finite(double value);
  static Curvature unbounded() { return Curvature(); }

  bool is_finite() const { return value_.has_value(); }
  double value() const;  // throws DomainError when unbounded
  std::string to_string() const;

 private:
  Curvature() = default;
  std::optional<double> value_;
};

struct SmoothnessBounds {
  double m = 0.0;
  Curvature L = Curvature::unbounded();

  // 0 <= m, and m <= L when L is finite.
  static SmoothnessBounds make(double m, Curvature L);
  // f-style bounds: 0 < m <= L < inf.
  static SmoothnessBounds strongly_convex(double m, double L);
};

// h(x) = 0.5 x^T Q x + q^T x
struct QuadraticHint {
  Eigen::MatrixXd Q;
  Eigen::VectorXd q;
};
// h(x) = weight * ||x||_1
struct L1Hint {
  double weight = 1.0;
};
// h == 0
struct ZeroHint {};
// h = indicator of {0}
struct IndicatorZeroHint {};
// Smooth function known only through value, gradient and Hessian.
struct GenericHint {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

using ProxHint = std::variant<QuadraticHint, L1Hint, ZeroHint, IndicatorZeroHint, GenericHint>;

class FunctionOracle {
 public:
  static FunctionOracle quadratic(Eigen::MatrixXd Q, Eigen::VectorXd q, SmoothnessBounds bounds);
  static FunctionOracle l1(Eigen::Index dim, double weight);
  static FunctionOracle zero(Eigen::Index dim);
  static FunctionOracle indicator_zero(Eigen::Index dim);
  static FunctionOracle generic(Eigen::Index dim, GenericHint hint, SmoothnessBounds bounds);

  Eigen::Index dim() const { return dim_; }
  const SmoothnessBounds& bounds() const { return bounds_; }
  const ProxHint& hint() const { return hint_; }
  std::string tag() const;

  // +infinity outside the domain of an indicator.
  double evaluate(const Eigen::VectorXd& x) const;
  // Throws DomainError for nonsmooth tags.
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  bool smooth() const;

 private:
  FunctionOracle(Eigen::Index dim, ProxHint hint, SmoothnessBounds bounds)
      : dim_(dim), hint_(std::move(hint)), bounds_(bounds) {}
  void require_dim(const Eigen::VectorXd& x) const;

  Eigen::Index dim_ = 0;
  ProxHint hint_;
  SmoothnessBounds bounds_;
};

// Dimensions are checked on construction; rank and conditioning of A and B
// are checked by derive_params and validate_assumption.
class ProblemInstance {
 public:
  ProblemInstance(FunctionOracle f, FunctionOracle g, Eigen::MatrixXd A, Eigen::MatrixXd B,
                  Eigen::VectorXd c);

  const FunctionOracle& f() const { return f_; }
  const FunctionOracle& g() const { return g_; }
  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::MatrixXd& B() const { return B_; }
  const Eigen::VectorXd& c() const { return c_; }
  Eigen::Index p() const { return A_.cols(); }
  Eigen::Index q() const { return B_.cols(); }
  Eigen::Index r() const { return A_.rows(); }

  // Descending singular values.
  const std::vector<double>& sigma_A() const { return sigma_a_; }
  const std::vector<double>& sigma_B() const { return sigma_b_; }

 private:
  FunctionOracle f_;
  FunctionOracle g_;
  Eigen::MatrixXd A_;
  Eigen::MatrixXd B_;
  Eigen::VectorXd c_;
  std::vector<double> sigma_a_;
  std::vector<double> sigma_b_;
};

struct DerivedParams {
  double m_hat = 0.0;
  double L_hat = 0.0;
  double rho0 = 0.0;
  double kappa = 0.0;
  double kappa_f = 0.0;
  double kappa_A = 0.0;
  double kappa_B = 0.0;

  // Inverse map rho = rho0 * sqrt(m_hat * L_hat).
  double rho_for(double rho0_target) const;
};

// Relative threshold below which a singular value counts as zero.
inline constexpr double kRankTolerance = 1e-12;

// Throws ConditioningError for singular A / rank-deficient B and
// DomainError for rho <= 0.
DerivedParams derive_params(const ProblemInstance& instance, double rho);

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ViolatingPair {
  std::string function;  // "f" or "g"
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  double inner = 0.0;     // (grad h(x) - grad h(y))^T (x - y)
  double dist_sq = 0.0;   // ||x - y||^2
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  std::optional<ViolatingPair> violation;
  bool passed() const;
  std::string summary() const;
};

struct ValidationOptions {
  int samples = 10000;
  std::uint64_t seed = 0;
  double sample_radius = 10.0;
  double rel_tol = 1e-9;
};

// Diagnostics only; never throws for a violated assumption.
AssumptionReport validate_assumption(const ProblemInstance& instance,
                                     const ValidationOptions& options = {});

// Random f = 0.5 x^T Q x + q^T x with spectrum(Q) spanning [m, L], g = l1,
// square A = a_scale * O1 + a_perturbation * N, B = -b_scale * O2 (O orthogonal,
// N Gaussian), Gaussian c. Deterministic for a given seed on one platform.
struct RandomProblemOptions {
  std::uint64_t seed = 0;
  int n = 5;
  double m = 1.0;
  double L = 4.0;
  double a_scale = 2.0;
  double a_perturbation = 0.5;
  double b_scale = 1.7;
  double l1_weight = 0.5;
};

ProblemInstance random_quadratic_l1(const RandomProblemOptions& options);

}  // namespace admmrate

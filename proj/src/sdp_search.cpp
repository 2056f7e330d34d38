#include "admmrate/sdp_search.hpp"

#include "admmrate/certificate.hpp"
#include "admmrate/csv.hpp"
#include "admmrate/errors.hpp"
#include "admmrate/kernels.hpp"
#include "admmrate/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace admmrate {

LmiPencil LmiPencil::make(double alpha, double rho0, double kappa, double tau) {
  LmiPencil pencil;
  pencil.alpha = alpha;
  pencil.rho0 = rho0;
  pencil.kappa = kappa;
  pencil.tau = tau;
  pencil.base = Mat4::zero();

  Mat2 e11 = Mat2::zero();
  e11(0, 0) = 1.0;
  Mat2 e12 = Mat2::zero();
  e12(0, 1) = 1.0;
  e12(1, 0) = 1.0;
  Mat2 e22 = Mat2::zero();
  e22(1, 1) = 1.0;
  const Mat2 none = Mat2::zero();

  pencil.coeffs[0] = assemble_lmi(alpha, rho0, kappa, tau, e11, 0.0, 0.0);
  pencil.coeffs[1] = assemble_lmi(alpha, rho0, kappa, tau, e12, 0.0, 0.0);
  pencil.coeffs[2] = assemble_lmi(alpha, rho0, kappa, tau, e22, 0.0, 0.0);
  pencil.coeffs[3] = assemble_lmi(alpha, rho0, kappa, tau, none, 1.0, 0.0);
  pencil.coeffs[4] = assemble_lmi(alpha, rho0, kappa, tau, none, 0.0, 1.0);
  return pencil;
}

Mat4 LmiPencil::evaluate(const DecisionVector& v) const {
  Mat4 out;
  kernels::combine(coeffs, v, out);
  out += base;
  return out;
}

const char* to_string(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::kFeasible: return "feasible";
    case FeasibilityStatus::kInfeasible: return "infeasible";
    case FeasibilityStatus::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

DecisionVector normalize_witness(const DecisionVector& v) {
  const double half_trace = 0.5 * (v[0] + v[2]);
  if (!(half_trace > 0.0) || !std::isfinite(half_trace))
    throw DomainError("normalize_witness: trace(P) must be positive");
  DecisionVector out;
  for (std::size_t i = 0; i < 5; ++i) out[i] = v[i] / half_trace;
  return out;
}

namespace {

// Coordinates on the slice trace(P) = 2:
//   P = [[1 + a, b], [b, 1 - a]], y = (a, b, lambda1, lambda2),
// so P >= floor * I  <=>  a^2 + b^2 <= (1 - floor)^2.
using SliceVector = std::array<double, 4>;

struct SlicePencil {
  Mat4 center;               // M at P = I, lambda = 0
  std::array<Mat4, 4> dirs;  // d/da, d/db, d/dlambda1, d/dlambda2
  std::array<Mat4, 5> all;   // center followed by dirs, for combine()

  explicit SlicePencil(const LmiPencil& p) {
    center = p.base + p.coeffs[0] + p.coeffs[2];
    dirs[0] = p.coeffs[0] - p.coeffs[2];
    dirs[1] = p.coeffs[1];
    dirs[2] = p.coeffs[3];
    dirs[3] = p.coeffs[4];
    all[0] = center;
    for (std::size_t i = 0; i < 4; ++i) all[i + 1] = dirs[i];
  }

  Mat4 evaluate(const SliceVector& y) const {
    const std::array<double, 5> w{1.0, y[0], y[1], y[2], y[3]};
    Mat4 out;
    kernels::combine(all, w, out);
    return out;
  }
};

DecisionVector to_decision(const SliceVector& y) {
  return {1.0 + y[0], y[1], 1.0 - y[0], y[2], y[3]};
}

SliceVector to_slice(const DecisionVector& v) {
  const DecisionVector n = normalize_witness(v);
  return {0.5 * (n[0] - n[2]), n[1], n[3], n[4]};
}

// exp-divided difference (e^x - e^y) / (x - y), stable for x ~ y.
double exp_divided_difference(double x, double y, double ex, double ey) {
  const double d = x - y;
  if (std::abs(d) < 1e-12) return 0.5 * (ex + ey);
  if (std::abs(d) > 0.5) return (ex - ey) / d;
  return (d > 0.0 ? ey : ex) * std::expm1(std::abs(d)) / std::abs(d);
}

class SmoothedSpectralSolver {
 public:
  SmoothedSpectralSolver(const LmiPencil& pencil, const SolverOptions& options)
      : pencil_(pencil), options_(options), radius_(1.0 - options.p_floor) {
    for (const Mat4& d : pencil_.all) scale_ = std::max(scale_, max_abs_entry(d.v));
    if (scale_ == 0.0) scale_ = 1.0;
  }

  FeasibilityResult run(const std::optional<DecisionVector>& seed) {
    SliceVector y{0.0, 0.0, 1.0, 1.0};
    FeasibilityResult result;

    if (seed) {
      y = to_slice(*seed);
      const double r = std::hypot(y[0], y[1]);
      if (r > radius_) {
        y[0] *= radius_ / r;
        y[1] *= radius_ / r;
      }
      y[2] = std::max(y[2], 0.0);
      y[3] = std::max(y[3], 0.0);
    }

    // Iteration 0: the starting point may already be feasible.
    {
      const auto eig = eigen_symmetric(pencil_.evaluate(y));
      record_best(y, eig.max_value());
      if (eig.max_value() <= options_.tolerance * eig.norm())
        return feasible(y, eig.max_value(), 0);
    }

    // Move strictly inside the barrier domain.
    {
      const double r = std::hypot(y[0], y[1]);
      const double inner = radius_ * (1.0 - 1e-6);
      if (r > inner) {
        y[0] *= inner / r;
        y[1] *= inner / r;
      }
      const double lambda_floor = 1e-9 * std::max(1.0, std::max(y[2], y[3]));
      y[2] = std::max(y[2], lambda_floor);
      y[3] = std::max(y[3], lambda_floor);
    }

    double mu = 0.1 * scale_;
    const double mu_floor = 1e-13 * scale_;
    int it = 0;
    while (it < options_.max_iterations) {
      const Model model = evaluate_model(y, mu);
      record_best(y, model.lambda_max);
      if (model.lambda_max <= options_.tolerance * model.norm)
        return feasible(y, model.lambda_max, it);

      if (model.lower_bound && *model.lower_bound > 10.0 * options_.tolerance * model.norm) {
        result.status = FeasibilityStatus::kInfeasible;
        result.witness = to_decision(y);
        result.certified_lambda_max = *model.lower_bound;
        result.iterations = it;
        return result;
      }

      // Newton direction on smoothed lambda_max + barrier.
      Eigen::Matrix4d h;
      Eigen::Vector4d g;
      for (int i = 0; i < 4; ++i) {
        g(i) = model.grad[static_cast<std::size_t>(i)];
        for (int j = 0; j < 4; ++j)
          h(i, j) = model.hess[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
      Eigen::Vector4d dir;
      const Eigen::LDLT<Eigen::Matrix4d> ldlt(h);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        dir = -ldlt.solve(g);
      } else {
        dir = -g;
      }
      double slope = g.dot(dir);
      if (!(slope < 0.0)) {
        dir = -g;
        slope = -g.squaredNorm();
      }

      double step = 1.0;
      SliceVector trial = y;
      bool accepted = false;
      // Steps below this are lost in rounding and count as a stall.
      const double y_norm = std::hypot(std::hypot(y[0], y[1]), std::hypot(y[2], y[3]));
      const double min_step = 1e-13 * (1.0 + y_norm) / std::max(dir.norm(), 1e-300);
      for (; step >= min_step; step *= 0.5) {
        for (std::size_t i = 0; i < 4; ++i)
          trial[i] = y[i] + step * dir(static_cast<Eigen::Index>(i));
        const auto value = objective(trial, mu);
        if (value && *value <= model.objective + 0.25 * step * slope) {
          accepted = true;
          break;
        }
      }
      ++it;
      if (accepted) y = trial;

      const double decrement = -slope;
      if (!accepted || decrement < 1e-3 * mu) {
        mu *= 0.2;
        if (mu < mu_floor) break;
      }
    }

    result.status = FeasibilityStatus::kInconclusive;
    result.witness = to_decision(best_y_);
    result.certified_lambda_max = best_lambda_max_;
    result.iterations = it;
    return result;
  }

 private:
  struct Model {
    double lambda_max = 0.0;
    double norm = 0.0;
    double objective = 0.0;
    std::array<double, 4> grad{};
    std::array<std::array<double, 4>, 4> hess{};
    std::optional<double> lower_bound;
  };

  double barrier_radius_gap(const SliceVector& y) const {
    return radius_ * radius_ - y[0] * y[0] - y[1] * y[1];
  }

  std::optional<double> objective(const SliceVector& y, double mu) const {
    const double r2 = barrier_radius_gap(y);
    if (!(r2 > 0.0) || !(y[2] > 0.0) || !(y[3] > 0.0)) return std::nullopt;
    const auto eig = eigen_symmetric(pencil_.evaluate(y));
    const double lm = eig.max_value();
    double s = 0.0;
    for (double l : eig.values) s += std::exp((l - lm) / mu);
    return lm + mu * std::log(s) - mu * (std::log(y[2]) + std::log(y[3]) + std::log(r2));
  }

  Model evaluate_model(const SliceVector& y, double mu) const {
    Model m;
    const auto eig = eigen_symmetric(pencil_.evaluate(y));
    m.lambda_max = eig.max_value();
    m.norm = eig.norm();

    std::array<double, 4> x{}, e{};
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      x[i] = (eig.values[i] - m.lambda_max) / mu;
      e[i] = std::exp(x[i]);
      s += e[i];
    }
    std::array<double, 4> w{};
    for (std::size_t i = 0; i < 4; ++i) w[i] = e[i] / s;

    // Eigenbasis representations of the center and direction matrices.
    Mat4 hc;
    kernels::congruence(eig.vectors, pencil_.center, hc);
    std::array<Mat4, 4> hd;
    for (std::size_t j = 0; j < 4; ++j)
      kernels::congruence(eig.vectors, pencil_.dirs[j], hd[j]);

    std::array<double, 4> g{};
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t i = 0; i < 4; ++i) g[j] += w[i] * hd[j](i, i);

    // Weak-duality bound from Z = sum_i w_i u_i u_i^T (trace one, PSD):
    //   min_y lambda_max(M(y)) >= <Z, center> - R * |(<Z, Ka>, <Z, Kb>)|
    // whenever <Z, K_lambda1>, <Z, K_lambda2> >= 0. The softmax weights at
    // the current mu are rank-one once mu drops below an eigenvalue gap, so
    // a ladder of larger temperatures is tried as well.
    for (double t = mu; t <= 4.0 * scale_; t *= 4.0) {
      std::array<double, 4> wt{};
      double st = 0.0;
      for (std::size_t i = 0; i < 4; ++i) {
        wt[i] = std::exp((eig.values[i] - m.lambda_max) / t);
        st += wt[i];
      }
      std::array<double, 5> z{};
      for (std::size_t i = 0; i < 4; ++i) {
        const double wi = wt[i] / st;
        z[0] += wi * hc(i, i);
        for (std::size_t j = 0; j < 4; ++j) z[j + 1] += wi * hd[j](i, i);
      }
      if (z[3] < 0.0 || z[4] < 0.0) continue;
      const double bound = z[0] - radius_ * std::hypot(z[1], z[2]);
      if (!m.lower_bound || bound > *m.lower_bound) m.lower_bound = bound;
    }

    // Hessian of mu * log(sum exp(lambda_i / mu)) via divided differences.
    std::array<std::array<double, 4>, 4> dd{};
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t l = 0; l < 4; ++l)
        dd[i][l] = exp_divided_difference(x[i], x[l], e[i], e[l]) / (mu * mu);
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = j; k < 4; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
          for (std::size_t l = 0; l < 4; ++l) acc += dd[i][l] * hd[j](i, l) * hd[k](i, l);
        const double hjk = mu * (acc / s) - g[j] * g[k] / mu;
        m.hess[j][k] = hjk;
        m.hess[k][j] = hjk;
      }

    // Barrier -mu * (log l1 + log l2 + log(R^2 - a^2 - b^2)).
    const double r2 = barrier_radius_gap(y);
    m.grad = g;
    m.grad[0] += mu * 2.0 * y[0] / r2;
    m.grad[1] += mu * 2.0 * y[1] / r2;
    m.grad[2] -= mu / y[2];
    m.grad[3] -= mu / y[3];
    m.hess[0][0] += mu * (2.0 / r2 + 4.0 * y[0] * y[0] / (r2 * r2));
    m.hess[1][1] += mu * (2.0 / r2 + 4.0 * y[1] * y[1] / (r2 * r2));
    m.hess[0][1] += mu * 4.0 * y[0] * y[1] / (r2 * r2);
    m.hess[1][0] = m.hess[0][1];
    m.hess[2][2] += mu / (y[2] * y[2]);
    m.hess[3][3] += mu / (y[3] * y[3]);

    m.objective = m.lambda_max + mu * std::log(s) -
                  mu * (std::log(y[2]) + std::log(y[3]) + std::log(r2));
    return m;
  }

  void record_best(const SliceVector& y, double lambda_max) {
    if (lambda_max < best_lambda_max_) {
      best_lambda_max_ = lambda_max;
      best_y_ = y;
    }
  }

  FeasibilityResult feasible(const SliceVector& y, double lambda_max, int it) const {
    FeasibilityResult r;
    r.status = FeasibilityStatus::kFeasible;
    r.witness = to_decision(y);
    r.certified_lambda_max = lambda_max;
    r.iterations = it;
    return r;
  }

  SlicePencil pencil_;
  SolverOptions options_;
  double radius_;
  double scale_ = 0.0;
  SliceVector best_y_{0.0, 0.0, 1.0, 1.0};
  double best_lambda_max_ = std::numeric_limits<double>::infinity();
};

void require_bisection_options(const BisectionOptions& o) {
  if (!(o.bisect_tol > 0.0)) throw DomainError("bisection tolerance must be positive");
  if (!(o.lower > 0.0 && o.lower < o.upper && o.upper <= 1.0))
    throw DomainError("bisection bracket must satisfy 0 < lower < upper <= 1");
  if (!(o.solver.tolerance > 0.0)) throw DomainError("feasibility tolerance must be positive");
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

FeasibilityResult solve_feasibility(const LmiPencil& pencil,
                                    const SolverOptions& options,
                                    const std::optional<DecisionVector>& seed) {
  if (!(options.tolerance > 0.0)) throw DomainError("solve_feasibility: tolerance must be positive");
  if (!(options.p_floor > 0.0 && options.p_floor < 1.0))
    throw DomainError("solve_feasibility: p_floor must lie in (0, 1)");
  SmoothedSpectralSolver solver(pencil, options);
  return solver.run(seed);
}

MinimalTauResult minimal_tau(double alpha, double rho0, double kappa,
                             const BisectionOptions& options) {
  require_bisection_options(options);
  // Validates the structural parameters.
  (void)HatSystem::make(alpha, rho0, kappa);

  MinimalTauResult out;
  auto probe = [&](double tau, const std::optional<DecisionVector>& seed) {
    const LmiPencil pencil = LmiPencil::make(alpha, rho0, kappa, tau);
    FeasibilityResult r = solve_feasibility(pencil, options.solver, seed);
    out.trace.push_back({tau, r.status, r.certified_lambda_max, r.iterations});
    if (r.status == FeasibilityStatus::kInconclusive) ++out.inconclusive_probes;
    return r;
  };

  auto describe = [&] {
    std::ostringstream os;
    os << "minimal_tau(alpha=" << alpha << ", rho0=" << rho0 << ", kappa=" << kappa
       << "): probes";
    for (const auto& p : out.trace)
      os << " [tau=" << p.tau << " " << to_string(p.status) << " value=" << p.value << "]";
    return os.str();
  };

  double lo = options.lower;
  double hi = options.upper;
  const FeasibilityResult top = probe(hi, std::nullopt);
  if (top.status != FeasibilityStatus::kFeasible)
    throw SearchError(describe() + ": no feasible tau below the upper bracket");
  DecisionVector witness = top.witness;

  while (hi - lo > options.bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    const FeasibilityResult r = probe(mid, witness);
    if (r.status == FeasibilityStatus::kFeasible) {
      hi = mid;
      witness = r.witness;
    } else {
      lo = mid;
    }
  }

  // Feasibility must persist above the returned tau.
  for (int k = 1; k <= options.spot_checks; ++k) {
    const double tau = hi + (options.upper - hi) * k / (options.spot_checks + 1.0);
    if (tau <= hi) continue;
    const FeasibilityResult r = probe(tau, witness);
    if (r.status == FeasibilityStatus::kInfeasible) out.monotonicity_ok = false;
  }

  out.lower = lo;
  out.upper = hi;
  out.tau = 0.5 * (lo + hi);
  out.witness = witness;
  return out;
}

FrontierResult feasibility_frontier(double alpha, double rho0,
                                    const std::vector<double>& kappa_grid,
                                    const BisectionOptions& options, unsigned workers,
                                    double kappa_tol) {
  if (!(alpha >= 2.0))
    throw DomainError("feasibility_frontier: explores alpha >= 2 (closed form covers alpha < 2)");
  if (kappa_grid.empty()) throw DomainError("feasibility_frontier: empty kappa grid");
  if (!std::is_sorted(kappa_grid.begin(), kappa_grid.end()))
    throw DomainError("feasibility_frontier: kappa grid must be ascending");
  require_bisection_options(options);
  (void)HatSystem::make(alpha, rho0, kappa_grid.front());

  FrontierResult out;
  out.alpha = alpha;
  out.rho0 = rho0;
  out.points.resize(kappa_grid.size());

  parallel_for(kappa_grid.size(), workers, [&](std::size_t i) {
    FrontierPoint& pt = out.points[i];
    pt.kappa = kappa_grid[i];
    const LmiPencil top = LmiPencil::make(alpha, rho0, pt.kappa, options.upper);
    const FeasibilityResult r = solve_feasibility(top, options.solver);
    if (r.status == FeasibilityStatus::kInfeasible) {
      pt.status = "infeasible-at-all-tau<1";
      return;
    }
    if (r.status == FeasibilityStatus::kInconclusive) {
      pt.status = "inconclusive";
      return;
    }
    try {
      const MinimalTauResult m = minimal_tau(alpha, rho0, pt.kappa, options);
      pt.feasible = true;
      pt.tau = m.tau;
      pt.status = "feasible";
    } catch (const std::exception& e) {
      pt.status = sanitize(e.what());
    }
  });

  std::optional<std::size_t> last_feasible;
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    if (out.points[i].feasible) {
      if (last_feasible && *last_feasible + 1 != i) out.interval_ok = false;
      if (!last_feasible && i != 0) out.interval_ok = false;
      last_feasible = i;
    }
  }
  if (!last_feasible) return out;
  out.largest_feasible_kappa = out.points[*last_feasible].kappa;
  if (*last_feasible + 1 >= out.points.size()) return out;

  // Refine the boundary between the last feasible and the next grid kappa.
  double k_lo = out.points[*last_feasible].kappa;
  double k_hi = out.points[*last_feasible + 1].kappa;
  while (k_hi - k_lo > kappa_tol * k_lo) {
    const double mid = 0.5 * (k_lo + k_hi);
    const LmiPencil p = LmiPencil::make(alpha, rho0, mid, options.upper);
    const FeasibilityResult r = solve_feasibility(p, options.solver);
    if (r.status == FeasibilityStatus::kFeasible)
      k_lo = mid;
    else
      k_hi = mid;
  }
  out.kappa_star = 0.5 * (k_lo + k_hi);
  return out;
}

std::vector<SweepRow> sweep(const std::vector<double>& alphas,
                            const std::vector<double>& rho0s,
                            const std::vector<double>& kappas,
                            const SweepOptions& options) {
  if (alphas.empty() || rho0s.empty() || kappas.empty())
    throw DomainError("sweep: every grid must be nonempty");
  require_bisection_options(options.bisection);

  const std::size_t n = alphas.size() * rho0s.size() * kappas.size();
  std::vector<SweepRow> rows(n);
  parallel_for(n, options.workers, [&](std::size_t idx) {
    SweepRow& row = rows[idx];
    row.alpha = alphas[idx / (rho0s.size() * kappas.size())];
    row.rho0 = rho0s[(idx / kappas.size()) % rho0s.size()];
    row.kappa = kappas[idx % kappas.size()];
    std::vector<std::string> notes;

    try {
      if (row.alpha <= 2.0) row.tau_formula = tau_formula(row.alpha, row.rho0, row.kappa);
      if (row.alpha <= 2.0 && row.kappa > 1.0) {
        const Certificate cert = explicit_certificate(row.alpha, row.rho0, row.kappa);
        row.lambda1 = cert.lambda1;
        row.lambda2 = cert.lambda2;
        const FeasibilityVerdict v = check_certificate(cert, options.feasibility_tol);
        row.lambda_max = v.lambda_max;
        if (!v.feasible) {
          row.failed = true;
          notes.push_back("certificate-infeasible");
        }
      }
    } catch (const std::exception& e) {
      row.failed = true;
      notes.push_back(sanitize(e.what()));
    }

    // At kappa = 1 the sector constraint on f degenerates and the pencil
    // certifies arbitrarily small tau; there is nothing to compare against.
    const bool compare = row.kappa > 1.0;
    if (!compare) notes.push_back("kappa=1: bisection skipped");
    if (compare) {
      try {
        const MinimalTauResult m = minimal_tau(row.alpha, row.rho0, row.kappa, options.bisection);
        row.tau_bisect = m.tau;
        if (m.inconclusive_probes > 0)
          notes.push_back("inconclusive-probes=" + std::to_string(m.inconclusive_probes));
        if (!m.monotonicity_ok) {
          row.failed = true;
          notes.push_back("non-monotone");
        }
      } catch (const std::exception& e) {
        row.failed = true;
        notes.push_back(sanitize(e.what()));
      }
    }

    if (!notes.empty()) {
      row.status.clear();
      for (std::size_t i = 0; i < notes.size(); ++i)
        row.status += (i ? "; " : "") + notes[i];
    }
  });
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    os << csv_number(r.alpha) << ',' << csv_number(r.rho0) << ',' << csv_number(r.kappa)
       << ',' << csv_number(r.tau_formula) << ',' << csv_number(r.tau_bisect) << ','
       << csv_number(r.lambda1) << ',' << csv_number(r.lambda2) << ','
       << csv_number(r.lambda_max) << ',' << sanitize(r.status) << '\n';
  }
}

std::optional<double> max_discrepancy(const std::vector<SweepRow>& rows) {
  std::optional<double> worst;
  for (const SweepRow& r : rows) {
    if (!r.tau_formula || !r.tau_bisect) continue;
    const double d = std::abs(*r.tau_formula - *r.tau_bisect);
    if (!worst || d > *worst) worst = d;
  }
  return worst;
}

void write_frontier_csv(std::ostream& os, const FrontierResult& result) {
  os << kFrontierCsvHeader << '\n';
  for (const FrontierPoint& p : result.points) {
    os << csv_number(result.alpha) << ',' << csv_number(result.rho0) << ','
       << csv_number(p.kappa) << ',' << (p.feasible ? 1 : 0) << ',' << csv_number(p.tau)
       << ',' << sanitize(p.status) << '\n';
  }
}

}  // namespace admmrate

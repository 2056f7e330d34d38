#include "admmrate/certificate.hpp"

#include "admmrate/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace admmrate {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void require_structural(double alpha, double rho0, double kappa,
                        const char* where) {
  if (!positive_finite(alpha))
    throw DomainError(std::string(where) + ": alpha must be positive, got " + fmt(alpha));
  if (!positive_finite(rho0))
    throw DomainError(std::string(where) + ": rho0 must be positive, got " + fmt(rho0));
  if (!std::isfinite(kappa) || kappa < 1.0)
    throw DomainError(std::string(where) + ": kappa must be >= 1, got " + fmt(kappa));
}

Mat4 block(const Mat2& a, const Mat2& b, const Mat2& c, const Mat2& d) {
  Mat4 m;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      m(i, j) = a(i, j);
      m(i, j + 2) = b(i, j);
      m(i + 2, j) = c(i, j);
      m(i + 2, j + 2) = d(i, j);
    }
  return m;
}

Mat2 make2(double a, double b, double c, double d) {
  Mat2 m;
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

}  // namespace

double chi(double x) {
  if (!positive_finite(x)) throw DomainError("chi: argument must be positive, got " + fmt(x));
  return std::max(x, 1.0 / x);
}

double tau_formula(double alpha, double rho0, double kappa) {
  require_structural(alpha, rho0, kappa, "tau_formula");
  if (alpha > 2.0)
    throw DomainError("tau_formula: closed form covers 0 < alpha <= 2, got alpha = " +
                      fmt(alpha));
  return 1.0 - alpha / (1.0 + chi(rho0) * std::sqrt(kappa));
}

HatSystem HatSystem::make(double alpha, double rho0, double kappa) {
  require_structural(alpha, rho0, kappa, "HatSystem");
  HatSystem h;
  h.a_hat = make2(1.0, alpha - 1.0, 0.0, 0.0);
  h.b_hat = make2(alpha, -1.0, 0.0, -1.0);
  h.c1_hat = make2(-1.0, -1.0, 0.0, 0.0);
  h.c2_hat = make2(1.0, alpha - 1.0, 0.0, 0.0);
  h.d1_hat = make2(-1.0, 0.0, 1.0, 0.0);
  h.d2_hat = make2(alpha, -1.0, 0.0, 1.0);
  const double off = (std::sqrt(kappa) + 1.0 / std::sqrt(kappa)) / rho0;
  h.m1 = make2(-2.0 / (rho0 * rho0), off, off, -2.0);
  h.m2 = make2(0.0, 1.0, 1.0, 0.0);
  return h;
}

Mat4 HatSystem::output_map() const { return block(c1_hat, d1_hat, c2_hat, d2_hat); }

Certificate explicit_certificate(double alpha, double rho0, double kappa) {
  require_structural(alpha, rho0, kappa, "explicit_certificate");
  if (alpha > 2.0)
    throw DomainError("explicit_certificate: requires 0 < alpha <= 2, got " + fmt(alpha));
  if (!(kappa > 1.0))
    throw DomainError(
        "explicit_certificate: requires kappa > 1 (lambda1 has a (kappa - 1) "
        "denominator), got " + fmt(kappa));

  const double sk = std::sqrt(kappa);
  const double c = chi(rho0) * sk;
  const double shifted = 1.0 - alpha + c;

  Certificate cert;
  cert.alpha = alpha;
  cert.rho0 = rho0;
  cert.kappa = kappa;
  cert.xi = -1.0 + alpha * (c - 1.0) / shifted;
  cert.p = make2(1.0, cert.xi, cert.xi, 1.0);
  cert.lambda1 = alpha * rho0 * sk * shifted / ((kappa - 1.0) * (1.0 + c));
  cert.lambda2 = 1.0 + cert.xi;
  cert.tau = 1.0 - alpha / (1.0 + c);
  return cert;
}

std::string certificate_to_json(const Certificate& cert) {
  nlohmann::ordered_json j;
  j["alpha"] = cert.alpha;
  j["rho0"] = cert.rho0;
  j["kappa"] = cert.kappa;
  j["tau"] = cert.tau;
  j["P"] = {{cert.p(0, 0), cert.p(0, 1)}, {cert.p(1, 0), cert.p(1, 1)}};
  j["xi"] = cert.xi;
  j["lambda1"] = cert.lambda1;
  j["lambda2"] = cert.lambda2;
  return j.dump(2);
}

Certificate certificate_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("certificate: ") + e.what());
  }
  Certificate cert;
  try {
    cert.alpha = j.at("alpha").get<double>();
    cert.rho0 = j.at("rho0").get<double>();
    cert.kappa = j.at("kappa").get<double>();
    cert.tau = j.at("tau").get<double>();
    const auto& p = j.at("P");
    if (p.size() != 2 || p[0].size() != 2 || p[1].size() != 2)
      throw ConfigError("certificate: P must be 2x2");
    cert.p = make2(p[0][0].get<double>(), p[0][1].get<double>(),
                   p[1][0].get<double>(), p[1][1].get<double>());
    cert.xi = j.value("xi", cert.p(0, 1));
    cert.lambda1 = j.at("lambda1").get<double>();
    cert.lambda2 = j.at("lambda2").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("certificate: ") + e.what());
  }
  return cert;
}

namespace {

struct LmiTerms {
  Mat4 lyapunov;
  Mat4 multipliers;
};

LmiTerms lmi_terms(double alpha, double rho0, double kappa, double tau, const Mat2& p,
                   double lambda1, double lambda2) {
  require_structural(alpha, rho0, kappa, "assemble_lmi");
  if (!(tau > 0.0 && tau <= 1.0))
    throw DomainError("assemble_lmi: tau must lie in (0, 1], got " + fmt(tau));

  const HatSystem h = HatSystem::make(alpha, rho0, kappa);
  const Mat2 at = h.a_hat.transpose();
  const Mat2 bt = h.b_hat.transpose();
  const Mat2 top_left = at * p * h.a_hat - (tau * tau) * p;
  const Mat2 top_right = at * p * h.b_hat;
  const Mat2 bottom_right = bt * p * h.b_hat;

  const Mat4 cd = h.output_map();
  const Mat4 w = block(lambda1 * h.m1, Mat2::zero(), Mat2::zero(), lambda2 * h.m2);
  return {block(top_left, top_right, top_right.transpose(), bottom_right),
          cd.transpose() * w * cd};
}

}  // namespace

Mat4 assemble_lmi(double alpha, double rho0, double kappa, double tau,
                  const Mat2& p, double lambda1, double lambda2) {
  const LmiTerms t = lmi_terms(alpha, rho0, kappa, tau, p, lambda1, lambda2);
  return t.lyapunov + t.multipliers;
}

double lmi_term_scale(const Certificate& cert) {
  const LmiTerms t = lmi_terms(cert.alpha, cert.rho0, cert.kappa, cert.tau, cert.p,
                               cert.lambda1, cert.lambda2);
  return std::max(max_abs_entry(t.lyapunov.v), max_abs_entry(t.multipliers.v));
}

FeasibilityVerdict check_certificate(const Certificate& cert, double rel_tol, CheckMode mode) {
  return check_feasible(assemble_lmi(cert), rel_tol, mode, lmi_term_scale(cert));
}

Mat4 assemble_lmi(const Certificate& cert) {
  return assemble_lmi(cert.alpha, cert.rho0, cert.kappa, cert.tau, cert.p,
                      cert.lambda1, cert.lambda2);
}

FeasibilityVerdict check_feasible(const Mat4& m, double rel_tol, CheckMode mode,
                                  double roundoff_scale) {
  if (!(rel_tol >= 0.0)) throw DomainError("check_feasible: tolerance must be >= 0");
  if (!(roundoff_scale >= 0.0)) throw DomainError("check_feasible: roundoff scale must be >= 0");
  const double asym = max_asymmetry(m);
  if (asym > 1e-12 * std::max(1.0, max_abs_entry(m.v)))
    throw DomainError("check_feasible: matrix is not symmetric");

  const auto eig = eigen_symmetric(m);
  FeasibilityVerdict out;
  out.lambda_max = eig.max_value();
  out.norm = eig.norm();
  out.tolerance_abs = rel_tol * out.norm +
                      16.0 * std::numeric_limits<double>::epsilon() * roundoff_scale;
  out.feasible = out.lambda_max <= out.tolerance_abs;
  if (mode == CheckMode::kEigenOnly) return out;

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const double s = out.norm;
  double worst = -std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < 16; ++mask) {
    std::array<std::size_t, 4> rows{};
    std::size_t k = 0;
    for (std::size_t i = 0; i < 4; ++i)
      if (mask & (1u << i)) rows[k++] = i;
    const MinorValue d = principal_minor(m, std::span(rows.data(), k));
    const double signed_value = (k % 2 == 0) ? d.value : -d.value;
    const double threshold =
        out.tolerance_abs * std::pow(s, static_cast<double>(k - 1)) +
        8.0 * kEps * d.magnitude;
    worst = std::max(worst, -signed_value - threshold);
  }
  out.worst_minor_excess = worst;
  out.minors_feasible = worst <= 0.0;

  if (*out.minors_feasible != out.feasible) {
    const bool near_tolerance = out.lambda_max <= 10.0 * out.tolerance_abs &&
                                out.lambda_max >= 0.1 * out.tolerance_abs;
    if (!near_tolerance) {
      std::ostringstream os;
      os << "check_feasible: eigenvalue route (lambda_max = " << out.lambda_max
         << ") and principal-minor route disagree (worst excess " << worst << ")";
      throw ConsistencyError(os.str());
    }
    out.marginal = true;
  }
  return out;
}

ClosedFormMinors principal_minors_closed_form(double alpha, double rho0,
                                              double kappa) {
  require_structural(alpha, rho0, kappa, "principal_minors_closed_form");
  if (alpha > 2.0)
    throw DomainError("principal_minors_closed_form: requires alpha <= 2");
  if (!(kappa > 1.0))
    throw DomainError("principal_minors_closed_form: requires kappa > 1");
  if (rho0 < 1.0)
    throw DomainError(
        "principal_minors_closed_form: closed forms exist only for the rho0 >= 1 "
        "branch; check rho0 < 1 numerically");

  const double a = alpha;
  const double r = rho0;
  const double k = kappa;
  const double s = std::sqrt(k);
  const double g = 1.0 + r * s;
  const double den = (k - 1.0) * r;

  ClosedFormMinors out;
  out.d2_43 = 2.0 * a * a * (2.0 - a) * (r * r - 1.0) * s * (1.0 - a + r * s) /
              (den * g * g * g);
  out.d2_41 = out.d2_43 * g * g;
  out.d1_432 = a * (2.0 * (a - 1.0) * s + (a - 2.0) * (1.0 + k) * r - 2.0 * r * r * s) /
               (den * g * g);
  out.d1_421 = out.d1_432 * g * g;
  const double inner =
      2.0 + 2.0 * a * (k - 1.0) - 4.0 * k + (a - 2.0) * (k - 1.0) * r * s;
  out.d1_431 = a * s * (2.0 * (a - 1.0) + r * (2.0 * (a - 2.0) * s + r * inner)) /
               (den * g * g);
  return out;
}

std::optional<double> ContractionBound::at(int t) const {
  if (!constant) return std::nullopt;
  return *constant * std::pow(tau, static_cast<double>(t));
}

ContractionBound contraction_bound(double alpha, double rho0, double kappa,
                                   double kappa_b) {
  require_structural(alpha, rho0, kappa, "contraction_bound");
  if (alpha >= 2.0)
    throw DomainError(
        "contraction_bound: requires alpha < 2; the condition parameter eta "
        "diverges when alpha -> 2");
  if (!std::isfinite(kappa_b) || kappa_b < 1.0)
    throw DomainError("contraction_bound: kappa_B must be >= 1, got " + fmt(kappa_b));

  const double c = chi(rho0) * std::sqrt(kappa);
  ContractionBound out;
  out.tau = 1.0 - alpha / (1.0 + c);
  out.eta = alpha / (2.0 - alpha) * (c - 1.0) / (c + 1.0);
  if (out.eta > 0.0) out.constant = kappa_b * std::sqrt(chi(out.eta));
  return out;
}

}  // namespace admmrate

#pragma once

// Rate certificates for the over-relaxed ADMM family: the 4x4 LMI whose
// feasibility certifies a contraction factor tau, the closed-form feasible
// point, its feasibility checks and the resulting explicit error bound.

#include "admmrate/linalg.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace admmrate {

// chi(x) = max(x, 1/x), defined for x > 0.
double chi(double x);

// tau = 1 - alpha / (1 + chi(rho0) sqrt(kappa)), for 0 < alpha <= 2,
// rho0 > 0, kappa >= 1.
double tau_formula(double alpha, double rho0, double kappa);

// Linear system matrices of the ADMM dynamics and the two sector multipliers.
// Entries depend on alpha only; M1 depends on (rho0, kappa).
struct HatSystem {
  Mat2 a_hat, b_hat;
  Mat2 c1_hat, c2_hat;
  Mat2 d1_hat, d2_hat;
  Mat2 m1, m2;

  static HatSystem make(double alpha, double rho0, double kappa);

  // [C1 D1; C2 D2] as a 4x4 block matrix.
  Mat4 output_map() const;
};

struct Certificate {
  double alpha = 0.0;
  double rho0 = 0.0;
  double kappa = 0.0;

  double tau = 0.0;
  Mat2 p;
  double xi = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

// Closed-form feasible point for 0 < alpha <= 2, kappa > 1, rho0 > 0:
//   P = [1 xi; xi 1], lambda2 = 1 + xi, lambda1 and tau as in kernels.hpp.
// At alpha = 2, xi = 1 and P is singular (positive semidefinite only).
Certificate explicit_certificate(double alpha, double rho0, double kappa);

std::string certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(std::string_view text);

// Left-hand side of the LMI at fixed tau:
//   [A^T P A - tau^2 P, A^T P B; B^T P A, B^T P B]
//     + [C|D]^T blkdiag(lambda1 M1, lambda2 M2) [C|D]
// Structural parameters must be positive, kappa >= 1 and 0 < tau <= 1.
Mat4 assemble_lmi(double alpha, double rho0, double kappa, double tau,
                  const Mat2& p, double lambda1, double lambda2);
Mat4 assemble_lmi(const Certificate& cert);

enum class CheckMode {
  kEigenOnly,  // production
  kBoth,       // eigenvalues and the sign pattern of all principal minors
};

struct FeasibilityVerdict {
  bool feasible = false;
  double lambda_max = 0.0;
  double norm = 0.0;           // spectral norm of the checked matrix
  double tolerance_abs = 0.0;  // rel_tol * norm
  // Minor route, populated in CheckMode::kBoth.
  std::optional<bool> minors_feasible;
  double worst_minor_excess = 0.0;  // max over subsets of -(-1)^k D_k - threshold
  // Routes disagreed with lambda_max within a factor 10 of the tolerance.
  bool marginal = false;
};

// Negative semidefiniteness test: lambda_max <= rel_tol * ||m||. In kBoth
// mode the 15 principal minors must also satisfy (-1)^k D_k >= -threshold;
// a disagreement outside the marginal band throws ConsistencyError.
//
// `roundoff_scale` adds 16 eps * roundoff_scale to the absolute tolerance. Pass
// the size of the summands the matrix was formed from when they may cancel
// exactly (at alpha = 2, rho0 = 1 the certificate LMI is identically zero and
// ||m|| is pure rounding noise).
FeasibilityVerdict check_feasible(const Mat4& m, double rel_tol = 1e-9,
                                  CheckMode mode = CheckMode::kEigenOnly,
                                  double roundoff_scale = 0.0);

// Largest entry magnitude of the two summands of the LMI (the Lyapunov part
// and the multiplier part) before they are added.
double lmi_term_scale(const Certificate& cert);

// check_feasible(assemble_lmi(cert)) with the roundoff floor of lmi_term_scale.
FeasibilityVerdict check_certificate(const Certificate& cert, double rel_tol = 1e-9,
                                     CheckMode mode = CheckMode::kEigenOnly);

// The five principal minors of the LMI at the explicit certificate that do
// not vanish identically, for rho0 >= 1. D_k^{J}: k x k minor with the
// indices in J (1-based) deleted.
struct ClosedFormMinors {
  double d2_43 = 0.0;   // rows {1,2}
  double d2_41 = 0.0;   // rows {2,3}
  double d1_432 = 0.0;  // row {1}
  double d1_421 = 0.0;  // row {3}
  double d1_431 = 0.0;  // row {2}

  std::array<double, 5> values() const {
    return {d2_43, d2_41, d1_432, d1_421, d1_431};
  }
};

// Zero-based kept rows matching ClosedFormMinors::values() order.
struct MinorIndexSet {
  std::array<std::size_t, 2> rows;
  std::size_t size;
};
inline constexpr std::array<MinorIndexSet, 5> kClosedFormMinorRows{{
    {{0, 1}, 2},
    {{1, 2}, 2},
    {{0, 0}, 1},
    {{2, 0}, 1},
    {{1, 0}, 1},
}};

ClosedFormMinors principal_minors_closed_form(double alpha, double rho0,
                                              double kappa);

struct ContractionBound {
  double tau = 0.0;
  double eta = 0.0;
  // kappa_B * sqrt(chi(eta)); empty when the bound is unbounded (kappa = 1,
  // where eta = 0 and chi(eta) grows without limit).
  std::optional<double> constant;

  // Bound on ||phi_t - phi*|| / ||phi_0 - phi*|| at iteration t.
  std::optional<double> at(int t) const;
};

// 0 < alpha < 2 (the constant diverges as alpha -> 2), rho0 > 0, kappa >= 1,
// kappa_b >= 1.
ContractionBound contraction_bound(double alpha, double rho0, double kappa,
                                   double kappa_b = 1.0);

}  // namespace admmrate

#include "admmrate/certificate.hpp"
#include "admmrate/errors.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace admmrate;

TEST(Chi, Values) {
  EXPECT_EQ(chi(1.0), 1.0);
  EXPECT_EQ(chi(0.5), 2.0);
  EXPECT_EQ(chi(2.0), 2.0);
  EXPECT_THROW(chi(0.0), DomainError);
  EXPECT_THROW(chi(-1.0), DomainError);
}

TEST(TauFormula, Examples) {
  EXPECT_NEAR(tau_formula(1, 1, 4), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(tau_formula(1, 1, 1), 0.5, 1e-15);
  for (double k : {1.0, 4.0, 25.0, 1e4})
    EXPECT_NEAR(tau_formula(2, 1, k), 1.0 - 2.0 / (1.0 + std::sqrt(k)), 1e-15);
  EXPECT_THROW(tau_formula(2.5, 1, 4), DomainError);
  EXPECT_THROW(tau_formula(1, 1, 0.5), DomainError);
  EXPECT_THROW(tau_formula(0, 1, 4), DomainError);
}

TEST(TauFormula, Monotone) {
  double prev = 1.0;
  for (double a = 0.1; a <= 2.0; a += 0.1) {
    const double t = tau_formula(a, 1.5, 10);
    EXPECT_LT(t, prev);
    prev = t;
  }
  EXPECT_LT(tau_formula(1, 1, 4), tau_formula(1, 2, 4));
  EXPECT_LT(tau_formula(1, 2, 4), tau_formula(1, 2, 5));
}

TEST(ExplicitCertificate, HandEvaluatedExample) {
  const Certificate c = explicit_certificate(1, 1, 4);
  EXPECT_NEAR(c.xi, -0.5, 1e-15);
  EXPECT_NEAR(c.lambda1, 4.0 / 9.0, 1e-15);
  EXPECT_NEAR(c.lambda2, 0.5, 1e-15);
  EXPECT_NEAR(c.tau, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(c.p(0, 0), 1.0);
  EXPECT_EQ(c.p(0, 1), c.xi);
}

TEST(ExplicitCertificate, LargeKappaApproachesIdentity) {
  EXPECT_NEAR(explicit_certificate(1, 1, 1e12).xi, 0.0, 1e-5);
}

TEST(ExplicitCertificate, AlphaTwoIsSingular) {
  const Certificate c = explicit_certificate(2, 1, 9);
  EXPECT_NEAR(c.tau, 0.5, 1e-15);
  EXPECT_NEAR(c.xi, 1.0, 1e-15);
}

TEST(ExplicitCertificate, Domain) {
  EXPECT_THROW(explicit_certificate(1, 1, 1), DomainError);
  EXPECT_THROW(explicit_certificate(2.1, 1, 4), DomainError);
  EXPECT_THROW(explicit_certificate(1, -1, 4), DomainError);
}

TEST(ExplicitCertificate, JsonRoundTrip) {
  const Certificate c = explicit_certificate(1.3, 0.7, 12);
  const Certificate back = certificate_from_json(certificate_to_json(c));
  EXPECT_EQ(back.tau, c.tau);
  EXPECT_EQ(back.xi, c.xi);
  EXPECT_EQ(back.lambda1, c.lambda1);
  EXPECT_EQ(back.lambda2, c.lambda2);
  EXPECT_EQ(back.p, c.p);
}

TEST(ExplicitCertificate, PEigenRatioIsChiEta) {
  for (double a : {0.5, 1.0, 1.5})
    for (double r : {0.5, 1.0, 3.0}) {
      const Certificate c = explicit_certificate(a, r, 10);
      const double big = 1.0 + std::abs(c.xi), small = 1.0 - std::abs(c.xi);
      const double eta = contraction_bound(a, r, 10).eta;
      EXPECT_NEAR(big / small, chi(eta), 1e-12 * chi(eta));
    }
}

TEST(AssembleLmi, EntryOneOneHandValue) {
  const Mat4 m = assemble_lmi(explicit_certificate(1, 1, 4));
  EXPECT_NEAR(m(0, 0), -1.0 / 3.0, 1e-14);
}

TEST(AssembleLmi, FourthRowVanishesAtCertificate) {
  for (double a : {0.3, 1.0, 1.9})
    for (double r : {0.2, 1.0, 5.0}) {
      const Mat4 m = assemble_lmi(explicit_certificate(a, r, 30));
      for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_NEAR(m(3, j), 0.0, 1e-13);
        EXPECT_NEAR(m(j, 3), 0.0, 1e-13);
      }
    }
}

TEST(AssembleLmi, MultiplierFreeCase) {
  // lambda = 0, P = I, tau = 1 leaves [A^T A - I, A^T B; B^T A, B^T B].
  const double alpha = 1.4;
  const HatSystem h = HatSystem::make(alpha, 1, 4);
  const Mat4 m = assemble_lmi(alpha, 1, 4, 1.0, Mat2::identity(), 0.0, 0.0);
  const Eigen::Matrix2d a = oracle::to_eigen(h.a_hat), b = oracle::to_eigen(h.b_hat);
  Eigen::Matrix4d ref;
  ref << a.transpose() * a - Eigen::Matrix2d::Identity(), a.transpose() * b, b.transpose() * a,
      b.transpose() * b;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(m(std::size_t(i), std::size_t(j)), ref(i, j), 1e-15);
}

TEST(AssembleLmi, MatchesDirectConstruction) {
  // Rebuild the LMI with Eigen block algebra from the hat matrices.
  const double alpha = 0.8, rho0 = 2.5, kappa = 17, tau = 0.9, l1 = 0.3, l2 = 0.7;
  Mat2 p;
  p(0, 0) = 1.2;
  p(0, 1) = p(1, 0) = 0.1;
  p(1, 1) = 0.8;
  const HatSystem h = HatSystem::make(alpha, rho0, kappa);
  const Eigen::Matrix2d A = oracle::to_eigen(h.a_hat), B = oracle::to_eigen(h.b_hat),
                        P = oracle::to_eigen(p);
  Eigen::Matrix4d ref;
  ref << A.transpose() * P * A - tau * tau * P, A.transpose() * P * B, B.transpose() * P * A,
      B.transpose() * P * B;
  Eigen::Matrix4d cd;
  cd << oracle::to_eigen(h.c1_hat), oracle::to_eigen(h.d1_hat), oracle::to_eigen(h.c2_hat),
      oracle::to_eigen(h.d2_hat);
  Eigen::Matrix4d mult = Eigen::Matrix4d::Zero();
  mult.topLeftCorner<2, 2>() = l1 * oracle::to_eigen(h.m1);
  mult.bottomRightCorner<2, 2>() = l2 * oracle::to_eigen(h.m2);
  ref += cd.transpose() * mult * cd;
  const Mat4 m = assemble_lmi(alpha, rho0, kappa, tau, p, l1, l2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(m(std::size_t(i), std::size_t(j)), ref(i, j), 1e-13);
}

TEST(CheckFeasible, Examples) {
  EXPECT_TRUE(check_feasible(assemble_lmi(explicit_certificate(1, 1, 4)), 1e-9, CheckMode::kBoth).feasible);
  Mat4 d;
  d(0, 0) = 1;
  d(1, 1) = d(2, 2) = d(3, 3) = -1;
  const auto v = check_feasible(d, 1e-9, CheckMode::kBoth);
  EXPECT_FALSE(v.feasible);
  EXPECT_NEAR(v.lambda_max, 1.0, 1e-15);
  ASSERT_TRUE(v.minors_feasible.has_value());
  EXPECT_FALSE(*v.minors_feasible);
  const auto z = check_feasible(Mat4::zero(), 1e-9, CheckMode::kBoth);
  EXPECT_TRUE(z.feasible);
  EXPECT_TRUE(*z.minors_feasible);
}

TEST(CheckFeasible, AgreesWithReferenceEigenvalue) {
  const Mat4 m = assemble_lmi(explicit_certificate(0.7, 3, 50));
  const auto v = check_feasible(m);
  EXPECT_NEAR(v.lambda_max, oracle::lambda_max(m), 1e-13 * oracle::spectral_norm(m));
}

TEST(ClosedFormMinors, VanishAtRhoOne) {
  const auto mins = principal_minors_closed_form(1, 1, 4);
  EXPECT_NEAR(mins.d2_43, 0.0, 1e-15);
}

TEST(ClosedFormMinors, RatioOfTwoByTwoMinors) {
  const auto mins = principal_minors_closed_form(1, 2, 4);
  EXPECT_NEAR(mins.d2_41, mins.d2_43 * std::pow(1 + 2 * 2, 2), 1e-12 * std::abs(mins.d2_41));
}

TEST(ClosedFormMinors, MatchNumericMinors) {
  for (double r : {1.0, 2.0, 10.0})
    for (double a : {0.5, 1.0, 1.9})
      for (double k : {2.0, 10.0, 100.0}) {
        const Mat4 m = assemble_lmi(explicit_certificate(a, r, k));
        const auto vals = principal_minors_closed_form(a, r, k).values();
        for (std::size_t i = 0; i < vals.size(); ++i) {
          const auto& set = kClosedFormMinorRows[i];
          const std::span<const std::size_t> rows(set.rows.data(), set.size);
          const MinorValue num = principal_minor(m, rows);
          EXPECT_NEAR(vals[i], oracle::minor(m, rows), 1e-10 * std::max(num.magnitude, 1e-300));
          const double sign = set.size % 2 ? -1.0 : 1.0;
          EXPECT_GE(sign * vals[i], -1e-12 * num.magnitude);
        }
      }
}

TEST(ClosedFormMinors, RejectRhoBelowOne) {
  EXPECT_ANY_THROW(principal_minors_closed_form(1, 0.5, 4));
}

TEST(ContractionBound, HandExample) {
  const auto b = contraction_bound(1, 1, 4, 1);
  EXPECT_NEAR(b.tau, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(b.eta, 1.0 / 3.0, 1e-15);
  ASSERT_TRUE(b.constant);
  EXPECT_NEAR(*b.constant, std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(*b.at(2), std::sqrt(3.0) * 4.0 / 9.0, 1e-14);
}

TEST(ContractionBound, KappaOneHasNoFiniteConstant) {
  const auto b = contraction_bound(1, 1, 1);
  EXPECT_EQ(b.eta, 0.0);
  EXPECT_NEAR(b.tau, 0.5, 1e-15);
  EXPECT_FALSE(b.constant.has_value());
}

TEST(ContractionBound, DivergesTowardAlphaTwo) {
  EXPECT_THROW(contraction_bound(2, 1, 4), DomainError);
  EXPECT_GT(*contraction_bound(1.999999, 1, 4).constant, 1e2);
}

TEST(CheckCertificate, CancellingTermsUseRoundoffFloor) {
  // At alpha = 2, rho0 = 1 the two summands cancel exactly; what is left is
  // rounding noise of either sign.
  for (double k : {1.5, 4.0, 100.0}) {
    const Certificate c = explicit_certificate(2, 1, k);
    const oracle::LmiReference ref = oracle::lmi(c);
    EXPECT_LE(ref.matrix.cwiseAbs().maxCoeff(), 64 * std::numeric_limits<double>::epsilon() * ref.scale);
    EXPECT_NEAR(lmi_term_scale(c), ref.scale, 1e-14 * ref.scale);
    EXPECT_TRUE(check_certificate(c, 1e-9, CheckMode::kBoth).feasible);
  }
  // The floor is tiny next to a genuine violation.
  Certificate bad = explicit_certificate(1, 1, 4);
  bad.tau = 0.6;
  EXPECT_FALSE(check_certificate(bad).feasible);
}

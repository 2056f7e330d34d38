#include "admmrate/certificate.hpp"
#include "admmrate/errors.hpp"
#include "admmrate/lower_bound.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace admmrate;

namespace {

// Spectral radius of the linear map phi -> phi+ obtained column by column
// from the engine itself, then diagonalised by Eigen.
double iteration_spectral_radius(const CounterexampleSpec& spec, double alpha) {
  const ProblemInstance inst = spec.instance();
  AdmmParams p;
  p.alpha = alpha;
  p.rho = spec.rho();
  const AdmmStepper stepper(inst, p);
  Eigen::MatrixXd T(4, 4);
  for (int k = 0; k < 4; ++k) {
    AdmmState s = AdmmState::zeros(inst);
    if (k < 2) s.z(k) = 1; else s.u(k - 2) = 1;
    T.col(k) = stepper.step(s).phi();
  }
  return Eigen::EigenSolver<Eigen::MatrixXd>(T).eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Counterexample, VariantSelection) {
  EXPECT_EQ(CounterexampleSpec::make(1, 4, 2).variant, CounterexampleVariant::kRho0AtLeastOne);
  EXPECT_EQ(CounterexampleSpec::make(1, 4, 0.5).variant, CounterexampleVariant::kRho0BelowOne);
  const auto s = CounterexampleSpec::make(1, 4, 0.5);
  EXPECT_NEAR(s.rho(), 4.0, 1e-15);
  const DerivedParams d = derive_params(s.instance(), s.rho());
  EXPECT_NEAR(d.rho0, 0.5, 1e-14);
  EXPECT_NEAR(d.kappa, 4.0, 1e-12);
}

TEST(Counterexample, RateExamples) {
  EXPECT_NEAR(counterexample_rate(CounterexampleSpec::make(1, 4, 1), 1), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(counterexample_rate(CounterexampleSpec::make(1, 9, 1), 2), 0.5, 1e-15);
  EXPECT_NEAR(counterexample_rate(CounterexampleSpec::make(1, 4, 0.5), 1), 0.8, 1e-15);
}

TEST(Counterexample, RateEqualsIterationSpectralRadius) {
  for (double alpha : {0.5, 1.0, 1.5, 1.99})
    for (double rho0 : {0.3, 0.5, 1.0, 2.0, 7.0}) {
      const auto spec = CounterexampleSpec::make(1, 10, rho0);
      const double radius = iteration_spectral_radius(spec, alpha);
      EXPECT_NEAR(counterexample_rate(spec, alpha), radius, 1e-12);
      EXPECT_NEAR(radius, oracle::tau(alpha, rho0, 10), 1e-12);
    }
}

TEST(VerifyLowerBound, WorstDirection) {
  const LowerBoundReport r = verify_lower_bound(CounterexampleSpec::make(1, 4, 1), 1);
  EXPECT_TRUE(r.matches);
  EXPECT_NEAR(r.observed, 2.0 / 3.0, 1e-6);
  ASSERT_TRUE(r.formula);
  EXPECT_NEAR(*r.formula, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(verify_lower_bound(CounterexampleSpec::make(1, 9, 1), 2).observed, 0.5, 1e-6);
}

TEST(VerifyLowerBound, OtherDirectionIsFlagged) {
  LowerBoundOptions o;
  o.worst_direction = false;
  const auto spec = CounterexampleSpec::make(1, 4, 1);
  const LowerBoundReport r = verify_lower_bound(spec, 1, o);
  EXPECT_EQ(r.note, "not worst-case direction");
  EXPECT_LT(r.observed, *r.formula);
  EXPECT_NEAR(r.observed, 1.0 - 4.0 / (4.0 + spec.rho()), 1e-6);
}

TEST(Gd, OptimalRates) {
  EXPECT_NEAR(gd_optimal_rate(4), 0.6, 1e-15);
  EXPECT_EQ(gd_optimal_rate(1), 0.0);
  EXPECT_NEAR(gd_optimal_rate(9), 0.8, 1e-15);
  EXPECT_THROW(gd_optimal_rate(0.5), DomainError);
  const GdSetting s = GdSetting::optimal(1, 4);
  EXPECT_NEAR(s.beta, 0.4, 1e-15);
  EXPECT_NEAR(std::max(std::abs(1 - s.beta * s.L_F), std::abs(1 - s.beta * s.m_F)), 0.6, 1e-15);
}

TEST(Gd, WitnessRate) {
  for (double kf : {2.0, 4.0, 16.0, 100.0})
    EXPECT_NEAR(gd_witness_rate(GdSetting::optimal(1, kf)), gd_optimal_rate(kf), 1e-6);
  EXPECT_EQ(gd_witness_rate(GdSetting::optimal(1, 1)), 0.0);
}

TEST(AdmmVsGd, TightWhenEqual) {
  const GdComparison c = admm_vs_gd(4, 4);
  EXPECT_NEAR(c.tau_admm, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.tau_gd, 0.6, 1e-15);
  EXPECT_NEAR(c.more_spec_rhs, 0.6, 1e-15);
  EXPECT_LE(std::abs(c.slack), kComparisonSlack);
  EXPECT_TRUE(c.admm_not_slower);
  EXPECT_TRUE(c.inequality_holds);
}

TEST(AdmmVsGd, PositiveSlack) {
  const GdComparison c = admm_vs_gd(4, 16);
  EXPECT_NEAR(c.tau_gd, 1 - 2.0 / 17.0, 1e-15);
  EXPECT_GT(c.slack, 0.0);
  EXPECT_THROW(admm_vs_gd(4, 2), DomainError);
}

TEST(AdmmVsGd, Csv) {
  std::ostringstream os;
  write_compare_csv(os, {admm_vs_gd(1, 1), admm_vs_gd(2, 4)});
  std::string header;
  std::istringstream is(os.str());
  std::getline(is, header);
  EXPECT_EQ(header, kCompareCsvHeader);
  int lines = 0;
  for (std::string l; std::getline(is, l);) ++lines;
  EXPECT_EQ(lines, 2);
}

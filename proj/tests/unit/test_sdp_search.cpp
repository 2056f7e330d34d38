#include "admmrate/certificate.hpp"
#include "admmrate/errors.hpp"
#include "admmrate/sdp_search.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace admmrate;

namespace {

DecisionVector from_certificate(const Certificate& c) {
  return {c.p(0, 0), c.p(0, 1), c.p(1, 1), c.lambda1, c.lambda2};
}

}  // namespace

TEST(LmiPencil, ReconstructsAssembledMatrix) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double alpha = 0.1 + 2.9 * (trial % 10) / 10.0, rho0 = 0.2 + trial % 7, kappa = 1.0 + trial;
    const double tau = 0.05 + 0.009 * trial;
    const LmiPencil pencil = LmiPencil::make(alpha, rho0, kappa, tau);
    const DecisionVector v{u(rng), u(rng), u(rng), u(rng), u(rng)};
    Mat2 p;
    p(0, 0) = v[0];
    p(0, 1) = p(1, 0) = v[1];
    p(1, 1) = v[2];
    const Mat4 ref = assemble_lmi(alpha, rho0, kappa, tau, p, v[3], v[4]);
    const Mat4 got = pencil.evaluate(v);
    // Entries reach ~1e2 here, where one ulp already exceeds 1e-14.
    for (std::size_t k = 0; k < 16; ++k)
      EXPECT_NEAR(got.v[k], ref.v[k], 1e-14 * std::max(1.0, std::abs(ref.v[k])));
  }
}

TEST(LmiPencil, AbsoluteAgreementAtUnitScale) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double alpha = 0.2 + 0.018 * trial, rho0 = 0.5 + 0.015 * trial, kappa = 1.0 + 0.09 * trial;
    const double tau = 0.1 + 0.009 * trial;
    const DecisionVector v{u(rng), u(rng), u(rng), u(rng), u(rng)};
    Mat2 p;
    p(0, 0) = v[0];
    p(0, 1) = p(1, 0) = v[1];
    p(1, 1) = v[2];
    const Mat4 ref = assemble_lmi(alpha, rho0, kappa, tau, p, v[3], v[4]);
    const Mat4 got = LmiPencil::make(alpha, rho0, kappa, tau).evaluate(v);
    for (std::size_t k = 0; k < 16; ++k) EXPECT_LE(std::abs(got.v[k] - ref.v[k]), 1e-14);
  }
}

TEST(NormalizeWitness, ScalesToTraceTwo) {
  const DecisionVector w = normalize_witness({2.0, 0.5, 2.0, 4.0, 1.0});
  EXPECT_DOUBLE_EQ(w[0] + w[2], 2.0);
  EXPECT_DOUBLE_EQ(w[3], 2.0);
  EXPECT_THROW(normalize_witness({-1.0, 0.0, 0.0, 1.0, 1.0}), DomainError);
}

TEST(SolveFeasibility, WarmStartFromCertificateIsImmediate) {
  for (double a : {0.5, 1.0, 1.5})
    for (double r : {0.5, 1.0, 4.0})
      for (double k : {4.0, 100.0}) {
        const Certificate c = explicit_certificate(a, r, k);
        const auto res = solve_feasibility(LmiPencil::make(a, r, k, c.tau), {}, from_certificate(c));
        EXPECT_EQ(res.status, FeasibilityStatus::kFeasible) << a << ' ' << r << ' ' << k;
        EXPECT_LE(res.iterations, 1);
      }
}

TEST(SolveFeasibility, FeasibleWitnessIsGenuine) {
  const auto res = solve_feasibility(LmiPencil::make(1, 1, 4, 2.0 / 3.0 + 1e-3));
  ASSERT_EQ(res.status, FeasibilityStatus::kFeasible);
  const Mat4 m = LmiPencil::make(1, 1, 4, 2.0 / 3.0 + 1e-3).evaluate(res.witness);
  EXPECT_LE(oracle::lambda_max(m), 1e-9 * oracle::spectral_norm(m) + 1e-15);
  EXPECT_NEAR(res.witness[0] + res.witness[2], 2.0, 1e-12);
  EXPECT_GE(res.witness[3], 0.0);
  EXPECT_GE(res.witness[4], 0.0);
}

TEST(SolveFeasibility, BelowFloorIsInfeasible) {
  const auto res = solve_feasibility(LmiPencil::make(1, 1, 4, 0.5));
  EXPECT_EQ(res.status, FeasibilityStatus::kInfeasible);
  EXPECT_GT(res.certified_lambda_max, 0.0);
  EXPECT_STREQ(to_string(res.status), "infeasible");
}

TEST(MinimalTau, Examples) {
  BisectionOptions o;
  EXPECT_NEAR(minimal_tau(1, 1, 4, o).tau, 2.0 / 3.0, o.bisect_tol);
  EXPECT_NEAR(minimal_tau(2, 1, 25, o).tau, 2.0 / 3.0, o.bisect_tol);
  EXPECT_NEAR(minimal_tau(0.5, 4, 10, o).tau, 1.0 - 0.5 / (1 + 4 * std::sqrt(10.0)), o.bisect_tol);
}

TEST(MinimalTau, BracketAndTrace) {
  const MinimalTauResult r = minimal_tau(1.2, 0.3, 50);
  EXPECT_LE(r.lower, r.tau);
  EXPECT_LE(r.tau, r.upper);
  EXPECT_LE(r.upper - r.lower, 1e-5);
  EXPECT_TRUE(r.monotonicity_ok);
  EXPECT_FALSE(r.trace.empty());
  // Never meaningfully below the lower bound given by the counterexample.
  EXPECT_GE(r.tau, oracle::tau(1.2, 0.3, 50) - 2e-5);
  const Mat4 m = LmiPencil::make(1.2, 0.3, 50, r.upper).evaluate(r.witness);
  EXPECT_LE(oracle::lambda_max(m), 1e-9 * oracle::spectral_norm(m) + 1e-15);
}

TEST(MinimalTau, RejectsBadOptions) {
  BisectionOptions o;
  o.bisect_tol = 0.0;
  EXPECT_THROW(minimal_tau(1, 1, 4, o), DomainError);
}

TEST(Frontier, AlphaTwoIsFeasibleEverywhere) {
  const FrontierResult r = feasibility_frontier(2.0, 1.0, {1.5, 4.0, 25.0});
  EXPECT_TRUE(r.interval_ok);
  for (const auto& p : r.points) {
    EXPECT_TRUE(p.feasible);
    ASSERT_TRUE(p.tau);
    EXPECT_NEAR(*p.tau, oracle::tau(2.0, 1.0, p.kappa), 2e-5);
  }
  EXPECT_FALSE(r.kappa_star);
}

TEST(Frontier, BeyondTwoTerminates) {
  const FrontierResult r = feasibility_frontier(2.6, 1.0, {5.0, 50.0});
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_TRUE(r.points[0].feasible);
  EXPECT_FALSE(r.points[1].feasible);
  EXPECT_EQ(r.points[1].status, "infeasible-at-all-tau<1");
  ASSERT_TRUE(r.kappa_star);
  EXPECT_GT(*r.kappa_star, 5.0);
  EXPECT_LT(*r.kappa_star, 50.0);
}

TEST(Frontier, RejectsAlphaBelowTwo) {
  EXPECT_THROW(feasibility_frontier(1.5, 1.0, {2.0}), DomainError);
}

TEST(Sweep, SingletonRow) {
  const auto rows = sweep({1.0}, {1.0}, {4.0});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(*rows[0].tau_formula, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(*rows[0].tau_bisect, 2.0 / 3.0, 1e-5);
  EXPECT_FALSE(rows[0].failed);
  std::ostringstream os;
  write_sweep_csv(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), kSweepCsvHeader);
}

TEST(Sweep, KappaOneUsesLimitAndSkipsBisection) {
  const auto rows = sweep({1.0}, {1.0}, {1.0});
  EXPECT_NEAR(*rows[0].tau_formula, 0.5, 1e-15);
  EXPECT_FALSE(rows[0].tau_bisect);
  EXPECT_FALSE(rows[0].failed);
}

TEST(Sweep, ClosedFormBlankBeyondTwo) {
  const auto rows = sweep({2.6}, {1.0}, {4.0});
  EXPECT_FALSE(rows[0].tau_formula);
  EXPECT_TRUE(rows[0].tau_bisect);
  EXPECT_FALSE(max_discrepancy(rows));
}

TEST(Sweep, EmptyGridThrows) {
  EXPECT_THROW(sweep({1.0}, {1.0}, {}), DomainError);
}

TEST(Sweep, OrderIndependentOfWorkerCount) {
  SweepOptions one, many;
  one.workers = 1;
  many.workers = 4;
  std::ostringstream a, b;
  write_sweep_csv(a, sweep({0.5, 1.5}, {0.5, 2.0}, {3.0, 30.0}, one));
  write_sweep_csv(b, sweep({0.5, 1.5}, {0.5, 2.0}, {3.0, 30.0}, many));
  EXPECT_EQ(a.str(), b.str());
}

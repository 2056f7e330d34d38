#include "admmrate/linalg.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace admmrate;

namespace {

Mat4 random_symmetric(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Mat4 m;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i; j < 4; ++j) m(i, j) = m(j, i) = n(rng);
  return m;
}

}  // namespace

TEST(Jacobi, MatchesReferenceSpectrum4x4) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Mat4 m = random_symmetric(rng, trial % 2 ? 1.0 : 1e4);
    const auto eig = eigen_symmetric(m);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> ref(oracle::to_eigen(m));
    const double scale = ref.eigenvalues().cwiseAbs().maxCoeff();
    for (int k = 0; k < 4; ++k)
      EXPECT_NEAR(eig.values[std::size_t(k)], ref.eigenvalues()(k), 1e-13 * scale);
    EXPECT_TRUE(std::is_sorted(eig.values.begin(), eig.values.end()));
  }
}

TEST(Jacobi, EigenvectorsReconstructMatrix) {
  std::mt19937_64 rng(11);
  const Mat4 m = random_symmetric(rng);
  const auto eig = eigen_symmetric(m);
  Mat4 d;
  for (std::size_t k = 0; k < 4; ++k) d(k, k) = eig.values[k];
  const Mat4 back = eig.vectors * d * eig.vectors.transpose();
  for (std::size_t k = 0; k < 16; ++k) EXPECT_NEAR(back.v[k], m.v[k], 1e-13);
  const Mat4 gram = eig.vectors.transpose() * eig.vectors;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(gram(i, j), i == j ? 1.0 : 0.0, 1e-14);
}

TEST(Jacobi, TwoByTwoClosedForm) {
  Mat2 m;
  m(0, 0) = 1.0;
  m(0, 1) = m(1, 0) = -0.5;
  m(1, 1) = 1.0;
  const auto eig = eigen_symmetric(m);
  EXPECT_NEAR(eig.values[0], 0.5, 1e-15);
  EXPECT_NEAR(eig.values[1], 1.5, 1e-15);
}

TEST(Jacobi, DiagonalAndZeroInputs) {
  Mat4 d;
  d(0, 0) = 1.0;
  d(1, 1) = d(2, 2) = d(3, 3) = -1.0;
  EXPECT_DOUBLE_EQ(eigen_symmetric(d).max_value(), 1.0);
  EXPECT_EQ(eigen_symmetric(Mat4::zero()).max_value(), 0.0);
}

TEST(Jacobi, DynamicSizeMatchesReference) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  Eigen::MatrixXd a(7, 7);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) a(i, j) = n(rng);
  a = (a + a.transpose()).eval();
  const std::vector<double> ours = symmetric_eigenvalues(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
  for (int k = 0; k < 7; ++k) EXPECT_NEAR(ours[std::size_t(k)], ref.eigenvalues()(k), 1e-12);
}

TEST(SingularValues, MatchReferenceSvd) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (auto [r, c] : {std::pair{5, 5}, std::pair{6, 3}, std::pair{3, 6}}) {
    Eigen::MatrixXd a(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) a(i, j) = n(rng);
    const std::vector<double> ours = singular_values(a);
    Eigen::JacobiSVD<Eigen::MatrixXd> ref(a);
    ASSERT_EQ(ours.size(), std::size_t(std::min(r, c)));
    for (std::size_t k = 0; k < ours.size(); ++k)
      EXPECT_NEAR(ours[k], ref.singularValues()(Eigen::Index(k)), 1e-12);
  }
}

TEST(SingularValues, RankDeficientHasZero) {
  Eigen::MatrixXd a(3, 3);
  a << 1, 2, 3, 2, 4, 6, 0, 1, 1;
  const auto s = singular_values(a);
  EXPECT_LT(s.back(), 1e-12 * s.front());
}

TEST(PrincipalMinor, MatchesDeterminant) {
  std::mt19937_64 rng(9);
  const Mat4 m = random_symmetric(rng);
  const std::vector<std::vector<std::size_t>> sets{{0}, {2}, {0, 3}, {1, 2, 3}, {0, 1, 2, 3}};
  for (const auto& rows : sets) {
    const MinorValue v = principal_minor(m, rows);
    EXPECT_NEAR(v.value, oracle::minor(m, rows), 1e-13);
    EXPECT_GE(v.magnitude, std::abs(v.value) - 1e-15);
  }
}

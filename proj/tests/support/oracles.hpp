#pragma once

// Independent reference computations shared by the test binaries. These go
// through Eigen's own solvers rather than the library's Jacobi routines.

#include "admmrate/certificate.hpp"
#include "admmrate/linalg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <span>

namespace oracle {

template <std::size_t N>
Eigen::Matrix<double, int(N), int(N)> to_eigen(const admmrate::Square<N>& m) {
  Eigen::Matrix<double, int(N), int(N)> out;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) out(int(i), int(j)) = m(i, j);
  return out;
}

inline double lambda_max(const admmrate::Mat4& m) {
  const Eigen::Matrix4d s = to_eigen(m);
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(0.5 * (s + s.transpose()),
                                                        Eigen::EigenvaluesOnly)
      .eigenvalues()
      .maxCoeff();
}

inline double spectral_norm(const admmrate::Mat4& m) {
  const Eigen::Matrix4d s = to_eigen(m);
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(0.5 * (s + s.transpose()),
                                                        Eigen::EigenvaluesOnly)
      .eigenvalues()
      .cwiseAbs()
      .maxCoeff();
}

// Principal minor over the kept zero-based rows, via LU determinant.
inline double minor(const admmrate::Mat4& m, std::span<const std::size_t> rows) {
  const auto k = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) sub(i, j) = m(rows[std::size_t(i)], rows[std::size_t(j)]);
  return sub.determinant();
}

// The LMI at a certificate rebuilt with Eigen block algebra from the hat
// matrices. `scale` is the largest entry of either summand, which bounds the
// rounding noise when they cancel.
struct LmiReference {
  Eigen::Matrix4d matrix;
  double scale = 0.0;
};

inline LmiReference lmi(const admmrate::Certificate& c) {
  const auto h = admmrate::HatSystem::make(c.alpha, c.rho0, c.kappa);
  const Eigen::Matrix2d A = to_eigen(h.a_hat), B = to_eigen(h.b_hat), P = to_eigen(c.p);
  Eigen::Matrix4d lyap;
  lyap << A.transpose() * P * A - c.tau * c.tau * P, A.transpose() * P * B, B.transpose() * P * A,
      B.transpose() * P * B;
  Eigen::Matrix4d cd;
  cd << to_eigen(h.c1_hat), to_eigen(h.d1_hat), to_eigen(h.c2_hat), to_eigen(h.d2_hat);
  Eigen::Matrix4d w = Eigen::Matrix4d::Zero();
  w.topLeftCorner<2, 2>() = c.lambda1 * to_eigen(h.m1);
  w.bottomRightCorner<2, 2>() = c.lambda2 * to_eigen(h.m2);
  const Eigen::Matrix4d mult = cd.transpose() * w * cd;
  return {lyap + mult, std::max(lyap.cwiseAbs().maxCoeff(), mult.cwiseAbs().maxCoeff())};
}

// Closed-form contraction factor, written out independently of the library.
inline double tau(double alpha, double rho0, double kappa) {
  const double chi = rho0 >= 1.0 ? rho0 : 1.0 / rho0;
  return 1.0 - alpha / (1.0 + chi * std::sqrt(kappa));
}

}  // namespace oracle

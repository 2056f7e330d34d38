#pragma once

// Small dense linear algebra: fixed-size square matrices for the 2x2 / 4x4
// certificate algebra, cyclic Jacobi for symmetric eigenproblems and
// one-sided Jacobi for singular values.

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace admmrate {

// Row-major N x N matrix with value semantics.
template <std::size_t N>
struct Square {
  alignas(32) std::array<double, N * N> v{};

  static constexpr std::size_t size = N;

  static Square zero() { return Square{}; }
  static Square identity() {
    Square m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return v[i * N + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v[i * N + j]; }

  double* data() { return v.data(); }
  const double* data() const { return v.data(); }

  Square transpose() const {
    Square t;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Square& operator+=(const Square& o) {
    for (std::size_t k = 0; k < N * N; ++k) v[k] += o.v[k];
    return *this;
  }
  Square& operator-=(const Square& o) {
    for (std::size_t k = 0; k < N * N; ++k) v[k] -= o.v[k];
    return *this;
  }
  Square& operator*=(double s) {
    for (auto& x : v) x *= s;
    return *this;
  }

  friend Square operator+(Square a, const Square& b) { return a += b; }
  friend Square operator-(Square a, const Square& b) { return a -= b; }
  friend Square operator*(double s, Square a) { return a *= s; }
  friend Square operator*(const Square& a, const Square& b) {
    Square c;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const double aik = a(i, k);
        for (std::size_t j = 0; j < N; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }
  friend bool operator==(const Square&, const Square&) = default;
};

using Mat2 = Square<2>;
using Mat4 = Square<4>;

double max_abs_entry(std::span<const double> a);
double frobenius_norm(std::span<const double> a);

template <std::size_t N>
double max_asymmetry(const Square<N>& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      const double d = m(i, j) - m(j, i);
      worst = d > worst ? d : (-d > worst ? -d : worst);
    }
  return worst;
}

// Cyclic Jacobi on a row-major symmetric n x n matrix, in place. On return the
// diagonal of `a` holds the eigenvalues and the columns of `vectors` (row-major
// n x n) the matching orthonormal eigenvectors. Sweeps stop once the
// off-diagonal Frobenius norm is below `off_tol` times the input norm.
// Returns the number of sweeps performed.
int jacobi_eigen_inplace(std::span<double> a, std::span<double> vectors,
                         std::size_t n, double off_tol = 1e-14,
                         int max_sweeps = 64);

template <std::size_t N>
struct SymmetricEigen {
  std::array<double, N> values{};  // ascending
  Square<N> vectors;               // column k pairs with values[k]
  int sweeps = 0;

  double max_value() const { return values[N - 1]; }
  double min_value() const { return values[0]; }
  double norm() const {
    const double a = values[0] < 0 ? -values[0] : values[0];
    const double b = values[N - 1] < 0 ? -values[N - 1] : values[N - 1];
    return a > b ? a : b;
  }
};

// Eigen-decomposition of a symmetric 4x4 matrix (symmetrized first).
SymmetricEigen<4> eigen_symmetric(const Mat4& m, double off_tol = 1e-14);

// Closed-form eigenvalues/vectors of a symmetric 2x2 matrix.
SymmetricEigen<2> eigen_symmetric(const Mat2& m);

// Eigenvalues (ascending) of a dense symmetric matrix by cyclic Jacobi.
std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m,
                                          double off_tol = 1e-14);

// Singular values (descending) by one-sided Jacobi (Hestenes). Works for any
// r x p; returns min(r, p) values.
std::vector<double> singular_values(const Eigen::MatrixXd& m,
                                    double tol = 1e-15);

// Principal minor over `rows` (sorted indices into an n x n row-major
// matrix), together with the Leibniz magnitude sum |prod| used to judge
// cancellation. Supports minors up to 4x4.
struct MinorValue {
  double value = 0.0;
  double magnitude = 0.0;
};
MinorValue principal_minor(const Mat4& m, std::span<const std::size_t> rows);

}  // namespace admmrate

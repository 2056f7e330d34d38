#include "admmrate/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace admmrate {

double max_abs_entry(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

double frobenius_norm(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

namespace {

double off_diagonal_norm(std::span<const double> a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += a[i * n + j] * a[i * n + j];
  return std::sqrt(s);
}

}  // namespace

int jacobi_eigen_inplace(std::span<double> a, std::span<double> vectors,
                         std::size_t n, double off_tol, int max_sweeps) {
  if (a.size() < n * n || vectors.size() < n * n)
    throw std::invalid_argument("jacobi_eigen_inplace: buffer too small");
  std::fill(vectors.begin(), vectors.begin() + n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) vectors[i * n + i] = 1.0;

  const double scale = frobenius_norm(a.first(n * n));
  if (scale == 0.0) return 0;
  const double target = off_tol * scale;

  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  auto vt = [&](std::size_t i, std::size_t j) -> double& {
    return vectors[i * n + j];
  };

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off_diagonal_norm(a, n) <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) /
              (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        at(p, p) -= t * apq;
        at(q, q) += t * apq;
        at(p, q) = 0.0;
        at(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double g = at(r, p);
          const double h = at(r, q);
          const double rp = g - s * (h + g * tau);
          const double rq = h + s * (g - h * tau);
          at(r, p) = rp;
          at(p, r) = rp;
          at(r, q) = rq;
          at(q, r) = rq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double g = vt(r, p);
          const double h = vt(r, q);
          vt(r, p) = g - s * (h + g * tau);
          vt(r, q) = h + s * (g - h * tau);
        }
      }
    }
  }
  return sweep;
}

SymmetricEigen<4> eigen_symmetric(const Mat4& m, double off_tol) {
  Mat4 a;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  Mat4 v;
  SymmetricEigen<4> out;
  out.sweeps = jacobi_eigen_inplace(a.v, v.v, 4, off_tol);

  std::array<std::size_t, 4> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  for (std::size_t k = 0; k < 4; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < 4; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

SymmetricEigen<2> eigen_symmetric(const Mat2& m) {
  const double a = m(0, 0);
  const double d = m(1, 1);
  const double b = 0.5 * (m(0, 1) + m(1, 0));
  const double mean = 0.5 * (a + d);
  const double half_diff = 0.5 * (a - d);
  const double r = std::hypot(half_diff, b);

  SymmetricEigen<2> out;
  out.values = {mean - r, mean + r};
  if (b == 0.0) {
    if (a <= d) {
      out.vectors = Mat2::identity();
    } else {
      out.vectors(0, 0) = 0.0;
      out.vectors(1, 0) = 1.0;
      out.vectors(0, 1) = 1.0;
      out.vectors(1, 1) = 0.0;
    }
    return out;
  }
  // Eigenvector of the larger eigenvalue: (b, r - half_diff) or the
  // numerically safer (r + half_diff, b).
  double x, y;
  if (half_diff >= 0.0) {
    x = r + half_diff;
    y = b;
  } else {
    x = b;
    y = r - half_diff;
  }
  const double nrm = std::hypot(x, y);
  x /= nrm;
  y /= nrm;
  out.vectors(0, 1) = x;
  out.vectors(1, 1) = y;
  out.vectors(0, 0) = -y;
  out.vectors(1, 0) = x;
  return out;
}

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m,
                                          double off_tol) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("symmetric_eigenvalues: matrix not square");
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<double> a(n * n), v(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a[i * n + j] = 0.5 * (m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                            m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
  jacobi_eigen_inplace(a, v, n, off_tol);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a[i * n + i];
  std::sort(values.begin(), values.end());
  return values;
}

std::vector<double> singular_values(const Eigen::MatrixXd& m, double tol) {
  Eigen::MatrixXd u = m.rows() >= m.cols() ? m : Eigen::MatrixXd(m.transpose());
  const Eigen::Index cols = u.cols();

  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (Eigen::Index i = 0; i + 1 < cols; ++i) {
      for (Eigen::Index j = i + 1; j < cols; ++j) {
        const double alpha = u.col(i).squaredNorm();
        const double beta = u.col(j).squaredNorm();
        const double gamma = u.col(i).dot(u.col(j));
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta))
          continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Eigen::VectorXd ci = u.col(i);
        u.col(i) = c * ci - s * u.col(j);
        u.col(j) = s * ci + c * u.col(j);
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sv(static_cast<std::size_t>(cols));
  for (Eigen::Index k = 0; k < cols; ++k)
    sv[static_cast<std::size_t>(k)] = u.col(k).norm();
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

MinorValue principal_minor(const Mat4& m, std::span<const std::size_t> rows) {
  const std::size_t k = rows.size();
  if (k == 0) return {1.0, 1.0};
  if (k > 4) throw std::invalid_argument("principal_minor: at most 4 rows");

  std::array<std::size_t, 4> perm{};
  std::iota(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k), 0);
  MinorValue out;
  do {
    // Parity by counting inversions.
    int inversions = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        if (perm[i] > perm[j]) ++inversions;
    double prod = 1.0;
    for (std::size_t i = 0; i < k; ++i) prod *= m(rows[i], rows[perm[i]]);
    out.value += (inversions % 2 == 0) ? prod : -prod;
    out.magnitude += std::abs(prod);
  } while (std::next_permutation(perm.begin(),
                                 perm.begin() + static_cast<std::ptrdiff_t>(k)));
  return out;
}

}  // namespace admmrate

#include "admmrate/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace admmrate::kernels::scalar {

void combine(const Mat4* basis, const double* weights, std::size_t n, Mat4& out) {
  out = Mat4::zero();
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    for (std::size_t k = 0; k < 16; ++k) out.v[k] += w * basis[i].v[k];
  }
}

void congruence(const Mat4& u, const Mat4& k, Mat4& out) {
  Mat4 ku;  // k * u
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < 4; ++r) s += k(i, r) * u(r, j);
      ku(i, j) = s;
    }
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < 4; ++r) s += u(r, i) * ku(r, j);
      out(i, j) = s;
    }
}

void closed_form_curves(double alpha, double rho0, const double* kappa,
                        std::size_t n, double* tau, double* xi, double* lambda1,
                        double* eta) {
  const double chi = std::max(rho0, 1.0 / rho0);
  const double eta_pre = alpha / (2.0 - alpha);
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = std::sqrt(kappa[i]);
    const double c = chi * sk;
    const double shifted = 1.0 - alpha + c;
    tau[i] = 1.0 - alpha / (1.0 + c);
    xi[i] = -1.0 + alpha * (c - 1.0) / shifted;
    lambda1[i] = alpha * rho0 * sk * shifted / ((kappa[i] - 1.0) * (1.0 + c));
    eta[i] = eta_pre * (c - 1.0) / (c + 1.0);
  }
}

}  // namespace admmrate::kernels::scalar

// AVX2/FMA kernel variants. Compiled with -mavx2 -mfma; only reached through
// the runtime dispatcher after a CPU feature check.

#include "admmrate/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace admmrate::kernels::avx2 {

void combine(const Mat4* basis, const double* weights, std::size_t n, Mat4& out) {
  __m256d r0 = _mm256_setzero_pd();
  __m256d r1 = _mm256_setzero_pd();
  __m256d r2 = _mm256_setzero_pd();
  __m256d r3 = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    const __m256d wv = _mm256_set1_pd(w);
    const double* b = basis[i].data();
    r0 = _mm256_fmadd_pd(wv, _mm256_load_pd(b + 0), r0);
    r1 = _mm256_fmadd_pd(wv, _mm256_load_pd(b + 4), r1);
    r2 = _mm256_fmadd_pd(wv, _mm256_load_pd(b + 8), r2);
    r3 = _mm256_fmadd_pd(wv, _mm256_load_pd(b + 12), r3);
  }
  double* o = out.data();
  _mm256_store_pd(o + 0, r0);
  _mm256_store_pd(o + 4, r1);
  _mm256_store_pd(o + 8, r2);
  _mm256_store_pd(o + 12, r3);
}

namespace {

// Row i of (a * b) for row-major 4x4 operands, b's rows preloaded.
inline __m256d row_times(const double* a_row, const __m256d b[4]) {
  __m256d acc = _mm256_mul_pd(_mm256_set1_pd(a_row[0]), b[0]);
  acc = _mm256_fmadd_pd(_mm256_set1_pd(a_row[1]), b[1], acc);
  acc = _mm256_fmadd_pd(_mm256_set1_pd(a_row[2]), b[2], acc);
  acc = _mm256_fmadd_pd(_mm256_set1_pd(a_row[3]), b[3], acc);
  return acc;
}

}  // namespace

void congruence(const Mat4& u, const Mat4& k, Mat4& out) {
  __m256d urows[4];
  for (int r = 0; r < 4; ++r) urows[r] = _mm256_load_pd(u.data() + 4 * r);

  // ku = k * u, row by row.
  alignas(32) double ku[16];
  for (int i = 0; i < 4; ++i)
    _mm256_store_pd(ku + 4 * i, row_times(k.data() + 4 * i, urows));

  // out = u^T * ku: row i of u^T is column i of u.
  __m256d kurows[4];
  for (int r = 0; r < 4; ++r) kurows[r] = _mm256_load_pd(ku + 4 * r);
  const Mat4 ut = u.transpose();
  for (int i = 0; i < 4; ++i)
    _mm256_store_pd(out.data() + 4 * i, row_times(ut.data() + 4 * i, kurows));
}

void closed_form_curves(double alpha, double rho0, const double* kappa,
                        std::size_t n, double* tau, double* xi, double* lambda1,
                        double* eta) {
  const double chi = rho0 > 1.0 / rho0 ? rho0 : 1.0 / rho0;
  const double eta_pre = alpha / (2.0 - alpha);

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vchi = _mm256_set1_pd(chi);
  const __m256d vrho_a = _mm256_set1_pd(alpha * rho0);
  const __m256d vone_minus_a = _mm256_set1_pd(1.0 - alpha);
  const __m256d veta = _mm256_set1_pd(eta_pre);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d k = _mm256_loadu_pd(kappa + i);
    const __m256d sk = _mm256_sqrt_pd(k);
    const __m256d c = _mm256_mul_pd(vchi, sk);
    const __m256d shifted = _mm256_add_pd(vone_minus_a, c);
    const __m256d c_plus = _mm256_add_pd(one, c);
    const __m256d c_minus = _mm256_sub_pd(c, one);

    _mm256_storeu_pd(tau + i, _mm256_sub_pd(one, _mm256_div_pd(va, c_plus)));
    _mm256_storeu_pd(
        xi + i, _mm256_sub_pd(_mm256_div_pd(_mm256_mul_pd(va, c_minus), shifted), one));
    const __m256d num = _mm256_mul_pd(_mm256_mul_pd(vrho_a, sk), shifted);
    const __m256d den = _mm256_mul_pd(_mm256_sub_pd(k, one), c_plus);
    _mm256_storeu_pd(lambda1 + i, _mm256_div_pd(num, den));
    _mm256_storeu_pd(eta + i,
                     _mm256_div_pd(_mm256_mul_pd(veta, c_minus), c_plus));
  }
  for (; i < n; ++i) {
    const double sk = std::sqrt(kappa[i]);
    const double c = chi * sk;
    const double shifted = 1.0 - alpha + c;
    tau[i] = 1.0 - alpha / (1.0 + c);
    xi[i] = alpha * (c - 1.0) / shifted - 1.0;
    lambda1[i] = alpha * rho0 * sk * shifted / ((kappa[i] - 1.0) * (1.0 + c));
    eta[i] = eta_pre * (c - 1.0) / (c + 1.0);
  }
}

}  // namespace admmrate::kernels::avx2

#pragma once

// Data-parallel inner kernels with a scalar reference implementation and an
// AVX2/FMA variant chosen at runtime. The scalar versions are the ground
// truth; the vector versions must agree with them to a few ulps.

#include "admmrate/linalg.hpp"

#include <span>
#include <string_view>

namespace admmrate::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);

// ISA used by the dispatching entry points below. Defaults to the best
// supported one; the environment variable ADMMRATE_FORCE_SCALAR=1 pins the
// scalar path.
Isa active_isa();

// Overrides the dispatch choice (tests, benchmarking). Throws DomainError if
// the ISA is not supported on this machine.
void set_active_isa(Isa isa);

// out = sum_i weights[i] * basis[i].
void combine(std::span<const Mat4> basis, std::span<const double> weights,
             Mat4& out);

// out = u^T k u.
void congruence(const Mat4& u, const Mat4& k, Mat4& out);

// Closed-form certificate curves over a batch of condition numbers at fixed
// (alpha, rho0). With c = chi(rho0) * sqrt(kappa):
//   tau     = 1 - alpha / (1 + c)
//   xi      = -1 + alpha (c - 1) / (1 - alpha + c)
//   lambda1 = alpha rho0 sqrt(kappa) (1 - alpha + c) / ((kappa - 1)(1 + c))
//   eta     = alpha / (2 - alpha) * (c - 1) / (c + 1)
// No domain checks: IEEE semantics apply (kappa = 1 gives lambda1 = NaN,
// alpha = 2 gives eta = inf). All spans must have kappa.size() elements.
struct CurveOut {
  std::span<double> tau;
  std::span<double> xi;
  std::span<double> lambda1;
  std::span<double> eta;
};
void closed_form_curves(double alpha, double rho0, std::span<const double> kappa,
                        const CurveOut& out);

// Explicit per-ISA entry points, used by the equivalence tests.
namespace scalar {
void combine(const Mat4* basis, const double* weights, std::size_t n, Mat4& out);
void congruence(const Mat4& u, const Mat4& k, Mat4& out);
void closed_form_curves(double alpha, double rho0, const double* kappa,
                        std::size_t n, double* tau, double* xi, double* lambda1,
                        double* eta);
}  // namespace scalar

namespace avx2 {
void combine(const Mat4* basis, const double* weights, std::size_t n, Mat4& out);
void congruence(const Mat4& u, const Mat4& k, Mat4& out);
void closed_form_curves(double alpha, double rho0, const double* kappa,
                        std::size_t n, double* tau, double* xi, double* lambda1,
                        double* eta);
}  // namespace avx2

}  // namespace admmrate::kernels

#include "admmrate/errors.hpp"
#include "admmrate/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace admmrate::kernels {

#ifndef ADMMRATE_HAVE_AVX2
namespace avx2 {
[[noreturn]] static void unavailable() {
  throw DomainError("AVX2 kernels were not compiled into this build");
}
void combine(const Mat4*, const double*, std::size_t, Mat4&) { unavailable(); }
void congruence(const Mat4&, const Mat4&, Mat4&) { unavailable(); }
void closed_form_curves(double, double, const double*, std::size_t, double*,
                        double*, double*, double*) {
  unavailable();
}
}  // namespace avx2
#endif

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(ADMMRATE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

namespace {

Isa detect() {
  if (const char* env = std::getenv("ADMMRATE_FORCE_SCALAR");
      env != nullptr && std::strcmp(env, "0") != 0 && env[0] != '\0')
    return Isa::kScalar;
  return isa_supported(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa))
    throw DomainError("ISA not supported here: " + std::string(isa_name(isa)));
  current().store(isa, std::memory_order_relaxed);
}

void combine(std::span<const Mat4> basis, std::span<const double> weights,
             Mat4& out) {
  if (basis.size() != weights.size())
    throw DomainError("combine: basis/weight size mismatch");
  if (active_isa() == Isa::kAvx2)
    avx2::combine(basis.data(), weights.data(), basis.size(), out);
  else
    scalar::combine(basis.data(), weights.data(), basis.size(), out);
}

void congruence(const Mat4& u, const Mat4& k, Mat4& out) {
  if (active_isa() == Isa::kAvx2)
    avx2::congruence(u, k, out);
  else
    scalar::congruence(u, k, out);
}

void closed_form_curves(double alpha, double rho0, std::span<const double> kappa,
                        const CurveOut& out) {
  const std::size_t n = kappa.size();
  if (out.tau.size() != n || out.xi.size() != n || out.lambda1.size() != n ||
      out.eta.size() != n)
    throw DomainError("closed_form_curves: output span size mismatch");
  if (active_isa() == Isa::kAvx2)
    avx2::closed_form_curves(alpha, rho0, kappa.data(), n, out.tau.data(),
                             out.xi.data(), out.lambda1.data(), out.eta.data());
  else
    scalar::closed_form_curves(alpha, rho0, kappa.data(), n, out.tau.data(),
                               out.xi.data(), out.lambda1.data(), out.eta.data());
}

}  // namespace admmrate::kernels

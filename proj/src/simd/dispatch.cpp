#include <atomic>
#include <cstdlib>
#include <string>

#include "qfc/core/errors.hpp"
#include "qfc/simd/kernels.hpp"

namespace qfc::simd {
namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(__i386__)) && defined(QFC_HAVE_AVX2_TU)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  const char* env = std::getenv("QFC_SIMD");
  if (env != nullptr && std::string(env) == "scalar") return Isa::kScalar;
  return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool isa_supported(Isa isa) { return isa == Isa::kScalar || cpu_has_avx2(); }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_supported(isa)) throw PreconditionError("requested SIMD variant is not supported on this CPU");
  current().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

void cmul(std::span<cplx> x, std::span<const cplx> w) {
  active_isa() == Isa::kAvx2 ? avx2::cmul(x, w) : scalar::cmul(x, w);
}

void caxpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  active_isa() == Isa::kAvx2 ? avx2::caxpy(alpha, x, y) : scalar::caxpy(alpha, x, y);
}

void rotate_pairs(std::span<cplx> a, std::span<cplx> b, std::span<const double> c,
                  std::span<const cplx> u) {
  active_isa() == Isa::kAvx2 ? avx2::rotate_pairs(a, b, c, u) : scalar::rotate_pairs(a, b, c, u);
}

double sum_abs2(std::span<const cplx> x) {
  return active_isa() == Isa::kAvx2 ? avx2::sum_abs2(x) : scalar::sum_abs2(x);
}

double dot(std::span<const double> x, std::span<const double> y) {
  return active_isa() == Isa::kAvx2 ? avx2::dot(x, y) : scalar::dot(x, y);
}

}  // namespace qfc::simd

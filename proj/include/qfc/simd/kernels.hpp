#pragma once

// Inner-loop kernels shared by the simulator, the measurement synthesizer and
// the mode analysis. Every kernel has a portable scalar reference version and
// an AVX2/FMA version; the variant is chosen once at runtime from CPUID and
// can be pinned with QFC_SIMD=scalar|avx2 or set_isa().

#include <complex>
#include <span>
#include <string_view>

namespace qfc::simd {

using cplx = std::complex<double>;

enum class Isa { kScalar, kAvx2 };

bool isa_supported(Isa isa);
Isa active_isa();
// Throws PreconditionError if `isa` is not available on this CPU.
void set_isa(Isa isa);
std::string_view isa_name(Isa isa);

// x[i] *= w[i]
void cmul(std::span<cplx> x, std::span<const cplx> w);
// y[i] += alpha * x[i]
void caxpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
// Pointwise 2x2 unitary: a' = c a + u b,  b' = -conj(u) a + c b.
// Unitary whenever c^2 + |u|^2 = 1.
void rotate_pairs(std::span<cplx> a, std::span<cplx> b, std::span<const double> c,
                  std::span<const cplx> u);
// sum |x[i]|^2
double sum_abs2(std::span<const cplx> x);
// sum x[i] * y[i]
double dot(std::span<const double> x, std::span<const double> y);

// Direct access to one variant, used by the equivalence tests.
namespace scalar {
void cmul(std::span<cplx> x, std::span<const cplx> w);
void caxpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
void rotate_pairs(std::span<cplx> a, std::span<cplx> b, std::span<const double> c,
                  std::span<const cplx> u);
double sum_abs2(std::span<const cplx> x);
double dot(std::span<const double> x, std::span<const double> y);
}  // namespace scalar

namespace avx2 {
void cmul(std::span<cplx> x, std::span<const cplx> w);
void caxpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
void rotate_pairs(std::span<cplx> a, std::span<cplx> b, std::span<const double> c,
                  std::span<const cplx> u);
double sum_abs2(std::span<const cplx> x);
double dot(std::span<const double> x, std::span<const double> y);
}  // namespace avx2

}  // namespace qfc::simd

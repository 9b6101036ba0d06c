// Compiled with -mavx2 -mfma on x86-64; only reached after a CPUID check.
#include <cassert>

#include "qfc/simd/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace qfc::simd::avx2 {
namespace {

inline double* raw(std::span<cplx> s) { return reinterpret_cast<double*>(s.data()); }
inline const double* raw(std::span<const cplx> s) {
  return reinterpret_cast<const double*>(s.data());
}

// Two complex products per register: [x0r x0i x1r x1i] * [w0r w0i w1r w1i].
inline __m256d cmul2(__m256d x, __m256d w) {
  const __m256d wr = _mm256_movedup_pd(w);
  const __m256d wi = _mm256_permute_pd(w, 0xF);
  const __m256d xs = _mm256_permute_pd(x, 0x5);
  return _mm256_fmaddsub_pd(x, wr, _mm256_mul_pd(xs, wi));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void cmul(std::span<cplx> x, std::span<const cplx> w) {
  assert(x.size() == w.size());
  const std::size_t n = x.size();
  double* px = raw(x);
  const double* pw = raw(w);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(px + 2 * i);
    const __m256d wv = _mm256_loadu_pd(pw + 2 * i);
    _mm256_storeu_pd(px + 2 * i, cmul2(xv, wv));
  }
  if (i < n) scalar::cmul(x.subspan(i), w.subspan(i));
}

void caxpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  const double* px = raw(x);
  double* py = raw(y);
  const __m256d av = _mm256_setr_pd(alpha.real(), alpha.imag(), alpha.real(), alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(px + 2 * i);
    const __m256d yv = _mm256_loadu_pd(py + 2 * i);
    _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(yv, cmul2(xv, av)));
  }
  if (i < n) scalar::caxpy(alpha, x.subspan(i), y.subspan(i));
}

void rotate_pairs(std::span<cplx> a, std::span<cplx> b, std::span<const double> c,
                  std::span<const cplx> u) {
  assert(a.size() == b.size() && a.size() == c.size() && a.size() == u.size());
  const std::size_t n = a.size();
  double* pa = raw(a);
  double* pb = raw(b);
  const double* pu = raw(u);
  // -conj(u) flips the sign of the real lanes only.
  const __m256d flip_re = _mm256_setr_pd(-0.0, 0.0, -0.0, 0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d av = _mm256_loadu_pd(pa + 2 * i);
    const __m256d bv = _mm256_loadu_pd(pb + 2 * i);
    const __m256d uv = _mm256_loadu_pd(pu + 2 * i);
    const __m256d vv = _mm256_xor_pd(uv, flip_re);
    const __m128d c2 = _mm_loadu_pd(c.data() + i);
    const __m256d cv = _mm256_permute4x64_pd(_mm256_castpd128_pd256(c2), 0x50);
    const __m256d na = _mm256_fmadd_pd(cv, av, cmul2(bv, uv));
    const __m256d nb = _mm256_fmadd_pd(cv, bv, cmul2(av, vv));
    _mm256_storeu_pd(pa + 2 * i, na);
    _mm256_storeu_pd(pb + 2 * i, nb);
  }
  if (i < n) scalar::rotate_pairs(a.subspan(i), b.subspan(i), c.subspan(i), u.subspan(i));
}

double sum_abs2(std::span<const cplx> x) {
  const std::size_t n = x.size();
  const double* px = raw(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(px + 2 * i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  if (i < n) s += scalar::sum_abs2(x.subspan(i));
  return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

}  // namespace qfc::simd::avx2

#else  // no AVX2 toolchain support: keep the symbols, route to scalar

namespace qfc::simd::avx2 {
void cmul(std::span<cplx> x, std::span<const cplx> w) { scalar::cmul(x, w); }
void caxpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) { scalar::caxpy(alpha, x, y); }
void rotate_pairs(std::span<cplx> a, std::span<cplx> b, std::span<const double> c,
                  std::span<const cplx> u) {
  scalar::rotate_pairs(a, b, c, u);
}
double sum_abs2(std::span<const cplx> x) { return scalar::sum_abs2(x); }
double dot(std::span<const double> x, std::span<const double> y) { return scalar::dot(x, y); }
}  // namespace qfc::simd::avx2

#endif

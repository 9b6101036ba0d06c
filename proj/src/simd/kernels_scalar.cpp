#include <cassert>

#include "qfc/simd/kernels.hpp"

namespace qfc::simd::scalar {

void cmul(std::span<cplx> x, std::span<const cplx> w) {
  assert(x.size() == w.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double wr = w[i].real(), wi = w[i].imag();
    x[i] = cplx(xr * wr - xi * wi, xi * wr + xr * wi);
  }
}

void caxpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  assert(x.size() == y.size());
  const double ar = alpha.real(), ai = alpha.imag();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = cplx(y[i].real() + (ar * xr - ai * xi), y[i].imag() + (ai * xr + ar * xi));
  }
}

void rotate_pairs(std::span<cplx> a, std::span<cplx> b, std::span<const double> c,
                  std::span<const cplx> u) {
  assert(a.size() == b.size() && a.size() == c.size() && a.size() == u.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    const double ur = u[i].real(), ui = u[i].imag();
    const double ci = c[i];
    // u b and -conj(u) a = (-ur + i ui) a
    const double ubr = ur * br - ui * bi, ubi = ui * br + ur * bi;
    const double var = -ur * ar - ui * ai, vai = ui * ar - ur * ai;
    a[i] = cplx(ci * ar + ubr, ci * ai + ubi);
    b[i] = cplx(ci * br + var, ci * bi + vai);
  }
}

double sum_abs2(std::span<const cplx> x) {
  double s = 0.0;
  for (const auto& v : x) s += v.real() * v.real() + v.imag() * v.imag();
  return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

}  // namespace qfc::simd::scalar

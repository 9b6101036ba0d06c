#include <random>
#include <vector>

#include "doctest.h"
#include "qfc/simd/kernels.hpp"

using namespace qfc::simd;

namespace {

std::vector<cplx> random_complex(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(d(rng), d(rng));
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Lengths chosen to hit empty input, pure tails and mixed vector/tail paths.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 17, 64, 255, 1000};

}  // namespace

TEST_CASE("cmul variants agree") {
  if (!isa_supported(Isa::kAvx2)) return;
  for (std::size_t n : kLengths) {
    auto x1 = random_complex(n, 1 + n), x2 = x1;
    const auto w = random_complex(n, 100 + n);
    scalar::cmul(x1, w);
    avx2::cmul(x2, w);
    CHECK(max_diff(x1, x2) < 1e-14);
  }
}

TEST_CASE("caxpy variants agree") {
  if (!isa_supported(Isa::kAvx2)) return;
  for (std::size_t n : kLengths) {
    const auto x = random_complex(n, 2 + n);
    auto y1 = random_complex(n, 200 + n), y2 = y1;
    scalar::caxpy(cplx(0.7, -1.3), x, y1);
    avx2::caxpy(cplx(0.7, -1.3), x, y2);
    CHECK(max_diff(y1, y2) < 1e-14);
  }
}

TEST_CASE("rotate_pairs variants agree and preserve norm") {
  for (std::size_t n : kLengths) {
    auto a1 = random_complex(n, 3 + n), b1 = random_complex(n, 300 + n);
    auto a2 = a1, b2 = b1;
    std::vector<double> c(n);
    std::vector<cplx> u(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double th = 0.37 * static_cast<double>(i) + 0.1;
      c[i] = std::cos(th);
      u[i] = std::polar(std::sin(th), 1.3 * static_cast<double>(i));
    }
    const double before = scalar::sum_abs2(a1) + scalar::sum_abs2(b1);
    scalar::rotate_pairs(a1, b1, c, u);
    CHECK(scalar::sum_abs2(a1) + scalar::sum_abs2(b1) == doctest::Approx(before).epsilon(1e-13));
    if (!isa_supported(Isa::kAvx2)) continue;
    avx2::rotate_pairs(a2, b2, c, u);
    CHECK(max_diff(a1, a2) < 1e-14);
    CHECK(max_diff(b1, b2) < 1e-14);
  }
}

TEST_CASE("reductions agree") {
  if (!isa_supported(Isa::kAvx2)) return;
  for (std::size_t n : kLengths) {
    const auto x = random_complex(n, 4 + n);
    CHECK(avx2::sum_abs2(x) == doctest::Approx(scalar::sum_abs2(x)).epsilon(1e-13));
    std::vector<double> p(n), q(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = x[i].real();
      q[i] = x[i].imag();
    }
    CHECK(avx2::dot(p, q) == doctest::Approx(scalar::dot(p, q)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("dispatch can be pinned") {
  const Isa original = active_isa();
  set_isa(Isa::kScalar);
  CHECK(active_isa() == Isa::kScalar);
  std::vector<cplx> x{cplx(1, 2)}, w{cplx(0, 1)};
  cmul(x, w);
  CHECK(x[0] == cplx(-2, 1));
  if (isa_supported(Isa::kAvx2)) {
    set_isa(Isa::kAvx2);
    CHECK(isa_name(active_isa()) == "avx2");
  }
  set_isa(original);
}

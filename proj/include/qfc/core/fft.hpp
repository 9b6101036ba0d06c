#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace qfc {

// Unnormalized 1-D complex DFT of a fixed length (FFTW underneath).
//   forward:  X_q = sum_n x_n exp(-2 pi i q n / N)
//   backward: x_n = sum_q X_q exp(+2 pi i q n / N)
// Plans use FFTW_ESTIMATE so results do not depend on runtime measurement, and
// executing a plan is safe from several threads at once.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&& other) noexcept;
  FftPlan& operator=(FftPlan&& other) noexcept;

  std::size_t size() const { return n_; }
  void forward(std::span<std::complex<double>> data) const;
  void backward(std::span<std::complex<double>> data) const;

 private:
  std::size_t n_ = 0;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

}  // namespace qfc

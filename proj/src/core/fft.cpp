#include "qfc/core/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <utility>
#include <vector>

#include "qfc/core/errors.hpp"

namespace qfc {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (n == 0) throw PreconditionError("FftPlan: size must be positive");
  std::vector<std::complex<double>> scratch(n);
  std::lock_guard<std::mutex> lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fwd_ = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(scratch.data()), as_fftw(scratch.data()),
                          FFTW_FORWARD, flags);
  bwd_ = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(scratch.data()), as_fftw(scratch.data()),
                          FFTW_BACKWARD, flags);
  if (fwd_ == nullptr || bwd_ == nullptr) throw NumericalError("FftPlan: FFTW planning failed");
}

FftPlan::~FftPlan() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

FftPlan::FftPlan(FftPlan&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      fwd_(std::exchange(other.fwd_, nullptr)),
      bwd_(std::exchange(other.bwd_, nullptr)) {}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
  if (this != &other) {
    std::swap(n_, other.n_);
    std::swap(fwd_, other.fwd_);
    std::swap(bwd_, other.bwd_);
  }
  return *this;
}

void FftPlan::forward(std::span<std::complex<double>> data) const {
  if (data.size() != n_) throw DimensionError("FftPlan::forward: size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), as_fftw(data.data()), as_fftw(data.data()));
}

void FftPlan::backward(std::span<std::complex<double>> data) const {
  if (data.size() != n_) throw DimensionError("FftPlan::backward: size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), as_fftw(data.data()), as_fftw(data.data()));
}

}  // namespace qfc

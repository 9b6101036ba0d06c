#include <cmath>

#include "qfc/core/errors.hpp"
#include "qfc/core/units.hpp"
#include "qfc/measure/dataset.hpp"

namespace qfc {

DelaySweepDataset::DelaySweepDataset(FrequencyGrid out_grid, std::vector<double> centers,
                                     std::vector<double> delays_ps, std::vector<double> intensities,
                                     SweepMetadata metadata)
    : out_grid_(std::move(out_grid)),
      centers_(std::move(centers)),
      delays_(std::move(delays_ps)),
      values_(std::move(intensities)),
      meta_(std::move(metadata)) {
  if (centers_.empty() || delays_.empty()) throw DimensionError("sweep dataset: no centers or no delays");
  if (values_.size() != centers_.size() * out_grid_.count() * delays_.size())
    throw DimensionError("sweep dataset: intensity tensor size does not match centers x out x delays");
  for (std::size_t i = 1; i < delays_.size(); ++i)
    if (!(delays_[i] > delays_[i - 1])) throw PreconditionError("sweep dataset: delays not increasing");
  for (double v : values_)
    if (!(v >= 0.0) || !std::isfinite(v)) throw PreconditionError("sweep dataset: intensities must be finite and non-negative");
  if (!(meta_.shear > 0.0)) throw PreconditionError("sweep dataset: shear must be positive");
  if (meta_.averages < 1) throw PreconditionError("sweep dataset: averages must be at least 1");
  if (!(meta_.amplitude > 0.0)) throw PreconditionError("sweep dataset: probe amplitude must be positive");
}

bool DelaySweepDataset::uniform_delays(double rel_tol) const {
  if (delays_.size() < 3) return true;
  const double step = (delays_.back() - delays_.front()) / static_cast<double>(delays_.size() - 1);
  for (std::size_t i = 1; i < delays_.size(); ++i)
    if (std::abs(delays_[i] - delays_[i - 1] - step) > rel_tol * step) return false;
  return true;
}

DelaySweepDataset DelaySweepDataset::with_warning(std::string warning) const {
  DelaySweepDataset copy = *this;
  copy.meta_.warnings.push_back(std::move(warning));
  return copy;
}

Eigen::MatrixXd osa_kernel(const FrequencyGrid& grid, double fwhm_nm) {
  if (!(fwhm_nm >= 0.0)) throw PreconditionError("osa_kernel: resolution must be non-negative");
  const std::size_t n = grid.count();
  if (fwhm_nm == 0.0) return Eigen::MatrixXd::Identity(n, n);
  const double lambda = units::omega_to_wavelength_nm(grid.center());
  const double sigma = units::nm_width_to_omega_width(fwhm_nm, lambda) / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = (grid.offset(i) - grid.offset(j)) / sigma;
      if (std::abs(x) > 12.0) continue;
      k(i, j) = std::exp(-0.5 * x * x);
      sum += k(i, j);
    }
    k.col(j) /= sum;
  }
  return k;
}

}  // namespace qfc

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qfc/core/greens.hpp"

namespace qfc {

struct NoiseSpec {
  double additive_sigma = 0.0;        // fraction of the peak noiseless intensity
  double multiplicative_sigma = 0.0;  // relative shot-to-shot amplitude jitter
  std::uint64_t seed = 0;

  bool is_zero() const { return additive_sigma == 0.0 && multiplicative_sigma == 0.0; }
};

struct SweepMetadata {
  double shear = 0.0;  // rad/s, as actually applied
  std::size_t averages = 1;
  std::uint64_t seed = 0;
  double osa_fwhm_nm = 0.0;
  double amplitude = 1.0;  // probe amplitude a0
  NoiseSpec noise;
  std::vector<std::string> warnings;
};

// Measured or synthesized output spectra I(center, out, delay).
class DelaySweepDataset {
 public:
  // `intensities` is laid out [center][out][delay] (delay fastest).
  DelaySweepDataset(FrequencyGrid out_grid, std::vector<double> centers, std::vector<double> delays_ps,
                    std::vector<double> intensities, SweepMetadata metadata);

  const FrequencyGrid& out_grid() const { return out_grid_; }
  const std::vector<double>& centers() const { return centers_; }
  const std::vector<double>& delays_ps() const { return delays_; }
  const std::vector<double>& intensities() const { return values_; }
  const SweepMetadata& metadata() const { return meta_; }

  std::size_t center_count() const { return centers_.size(); }
  std::size_t out_count() const { return out_grid_.count(); }
  std::size_t delay_count() const { return delays_.size(); }

  double at(std::size_t c, std::size_t k, std::size_t d) const {
    return values_[(c * out_count() + k) * delay_count() + d];
  }
  // Contiguous delay trace for one (center, out) pair.
  const double* trace(std::size_t c, std::size_t k) const {
    return values_.data() + (c * out_count() + k) * delay_count();
  }

  bool uniform_delays(double rel_tol = 1e-9) const;
  // Copy with extra warnings attached.
  DelaySweepDataset with_warning(std::string warning) const;

 private:
  FrequencyGrid out_grid_;
  std::vector<double> centers_;
  std::vector<double> delays_;
  std::vector<double> values_;
  SweepMetadata meta_;
};

// Normalized Gaussian spectral-resolution kernel (FWHM in nm at the grid
// center) applied along the output axis; every column sums to one so the
// integrated intensity is preserved.
Eigen::MatrixXd osa_kernel(const FrequencyGrid& grid, double fwhm_nm);

struct SweepRequest {
  std::vector<double> centers;    // rad/s, snapped to the input grid
  std::vector<double> delays_ps;  // strictly increasing
  double shear = 0.0;             // rad/s, snapped to a whole number of cells
  double amplitude = 1.0;
  NoiseSpec noise;
  double osa_fwhm_nm = 0.0;
  std::size_t averages = 1;
  std::size_t threads = 0;
};

DelaySweepDataset synthesize_sweep(const GreensFunction& g, const SweepRequest& request);

}  // namespace qfc

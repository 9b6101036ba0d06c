#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "qfc/core/greens.hpp"

namespace qfc {

// Singular-value (Schmidt) decomposition of a Green's function,
//   G = sum_i s_i out_i(omega_out) conj(in_i(omega_in)),
// with both mode families orthonormal under their grid quadrature. Each
// pair is phased so the largest input component is real and positive.
struct SchmidtDecomposition {
  Eigen::VectorXd singular_values;  // descending
  std::vector<SpectralMode> input_modes;
  std::vector<SpectralMode> output_modes;
  double schmidt_number = 0.0;  // (sum s^2)^2 / sum s^4

  // sum_i s_i out_i in_i^dagger as a Green's function.
  GreensFunction reconstruct() const;
};

SchmidtDecomposition schmidt(const GreensFunction& g, std::optional<std::size_t> rank = std::nullopt);

// Decomposition of G with the output rows outside `band` removed, so the
// leading input mode maximizes the conversion efficiency into the band.
SchmidtDecomposition schmidt_band_limited(const GreensFunction& g, const FrequencyBand& band,
                                          std::optional<std::size_t> rank = std::nullopt);

struct TimeSeries {
  std::vector<double> t_s;
  std::vector<cplx> values;  // s^(-1/2); sum |f|^2 dt = 1 for a normalized mode
  double dt = 0.0;
};

// f(t) = (2 pi)^(-1/2) sum_k f_k exp(-i omega_k t) spacing, with omega
// measured from the grid center, on `samples` points spanning one period
// 2 pi / spacing centred on t = 0.
TimeSeries time_domain_mode(const SpectralMode& f, std::size_t samples);

// Width between the outermost half-maximum crossings of a non-negative
// profile (linear interpolation between samples).
double full_width_half_max(const std::vector<double>& x, const std::vector<double>& y);
double intensity_fwhm(const TimeSeries& ts);

}  // namespace qfc

#pragma once

#include <cmath>
#include <functional>

#include "qfc/core/greens.hpp"
#include "qfc/core/units.hpp"

namespace qfc::testing {

// Input grid whose spacing is half the shear, so a probe centred on a grid
// point puts its tones one cell either side.
inline FrequencyGrid half_shear_grid(double center_nm, double shear_hz, std::size_t count) {
  return FrequencyGrid::from_wavelength(center_nm, units::hz_to_omega(shear_hz) / 2, count, "in");
}

// Smooth frequency-shifting kernel: a Gaussian ridge along
// omega_out - omega_in = shift with an input-side phase phi(omega_in - center).
inline GreensFunction ridge_kernel(const FrequencyGrid& in, const FrequencyGrid& out, double ridge_width,
                                   const std::function<double(double)>& input_phase = {},
                                   const std::function<double(double)>& output_phase = {}) {
  Eigen::MatrixXcd m(out.count(), in.count());
  for (std::size_t j = 0; j < in.count(); ++j) {
    const double pj = input_phase ? input_phase(in.offset(j)) : 0.0;
    for (std::size_t k = 0; k < out.count(); ++k) {
      const double x = (out.offset(k) - in.offset(j)) / ridge_width;
      const double pk = output_phase ? output_phase(out.offset(k)) : 0.0;
      m(k, j) = std::polar(0.05 * std::exp(-x * x) / in.spacing(), pj + pk);
    }
  }
  return GreensFunction(out, in, std::move(m));
}

}  // namespace qfc::testing

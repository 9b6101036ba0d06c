#pragma once

#include <vector>

#include "qfc/core/grid.hpp"

namespace qfc {

// Fiber-like dispersive section described by its group delay around a
// reference wavelength:
//   tau(lambda) = length * [beta1 + D (lambda - lref) + slope (lambda - lref)^2 / 2]
struct DispersionSpec {
  double reference_wavelength_nm = 1550.0;
  double group_delay_per_length = 0.0;  // ps/km
  double dispersion_d = 0.0;            // ps/(nm km)
  double dispersion_slope = 0.0;        // ps/(nm^2 km)
  double length_km = 0.0;

  bool is_null() const {
    return length_km == 0.0 ||
           (group_delay_per_length == 0.0 && dispersion_d == 0.0 && dispersion_slope == 0.0);
  }
};

// Largest |lambda - lref| for which dispersion_phase accepts a grid.
inline constexpr double kDispersionValidityNm = 100.0;

// Group delay in seconds at a wavelength (nm).
double group_delay(const DispersionSpec& spec, double lambda_nm);

// Accumulated spectral phase (rad) on the grid, zero at the reference
// frequency, with d(phi)/d(omega) equal to the group delay.
std::vector<double> dispersion_phase(const DispersionSpec& spec, const FrequencyGrid& grid);

}  // namespace qfc

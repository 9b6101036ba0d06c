#pragma once

#include <string>
#include <vector>

#include "qfc/core/grid.hpp"
#include "qfc/sim/converter.hpp"

namespace qfc::detail {

// omega_out(k) - omega_in(j) - shift, computed from grid offsets to avoid
// cancellation between optical frequencies.
inline double pump_detuning(const FrequencyGrid& out, std::size_t k, const FrequencyGrid& in,
                            std::size_t j, double shift) {
  return ((out.center() - in.center()) - shift) + (out.offset(k) - in.offset(j));
}

void check_spec(const BsfwmSpec& spec, const FrequencyGrid& in_grid, const FrequencyGrid& out_grid);

// Peak single-pass conversion estimate sin^2(kappa max|M| L_eff).
double peak_conversion_estimate(const BsfwmSpec& spec);
// Throws ValidityError when the first-order models are out of their regime (> 5 %).
void check_first_order(const BsfwmSpec& spec, const char* who);

// Propagation constant of a band in the pump frame, rad/m, at every grid
// point: omega_rel * walkoff + phi_band(omega) / L.
std::vector<double> band_wavenumbers(const FrequencyGrid& grid, double walkoff_ps_per_m,
                                     const DispersionSpec& band, double length_m);

}  // namespace qfc::detail

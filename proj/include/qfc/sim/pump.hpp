#pragma once

#include <complex>

namespace qfc {

// Gaussian pump pulse envelope
//   A(t) = A0 exp(-2 ln2 (t - t0)^2 / T^2) exp(i chirp (t - t0)^2)
// with T the intensity FWHM.
struct PumpEnvelope {
  double center_wavelength_nm = 0.0;
  double duration_fwhm_ps = 1.0;
  double chirp = 0.0;  // rad/ps^2
  double peak_amplitude = 1.0;
  double delay_ps = 0.0;

  std::complex<double> at(double t_s) const;
  // Complex Gaussian rate p = a - i c (1/s^2) so that A(t) = A0 exp(-p (t - t0)^2).
  std::complex<double> rate() const;
};

// Product M(t) = P(t) conj(Q(t)) that drives Bragg-scattering conversion.
std::complex<double> pump_product(const PumpEnvelope& p, const PumpEnvelope& q, double t_s);

// Analytic transform of the pump product,
//   M~(nu) = (2 pi)^(-1/2) * integral M(t) exp(i nu t) dt,   nu in rad/s.
std::complex<double> pump_product_spectrum(const PumpEnvelope& p, const PumpEnvelope& q, double nu);

// Returns a replacement for `p` such that the product spectrum with `q` acquires
// exactly the spectral phase gdd * nu^2 / 2 (gdd in ps^2) while |M~| is unchanged
// up to a constant phase. Requires p and q to share the same delay.
PumpEnvelope disperse_product(const PumpEnvelope& p, const PumpEnvelope& q, double gdd_ps2);

}  // namespace qfc

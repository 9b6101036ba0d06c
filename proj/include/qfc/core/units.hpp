#pragma once

#include <cmath>
#include <numbers>

namespace qfc::units {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kPico = 1e-12;
inline constexpr double kNano = 1e-9;

// Angular frequency (rad/s) <-> vacuum wavelength (nm).
inline double wavelength_nm_to_omega(double lambda_nm) {
  return kTwoPi * kSpeedOfLight / (lambda_nm * kNano);
}
inline double omega_to_wavelength_nm(double omega) {
  return kTwoPi * kSpeedOfLight / omega / kNano;
}

inline double hz_to_omega(double hz) { return kTwoPi * hz; }
inline double omega_to_hz(double omega) { return omega / kTwoPi; }

inline double ps_to_s(double ps) { return ps * kPico; }
inline double s_to_ps(double s) { return s / kPico; }

// Width conversions around a carrier: |d(omega)| = 2 pi c d(lambda) / lambda^2.
inline double nm_width_to_omega_width(double dlambda_nm, double lambda_nm) {
  const double lambda = lambda_nm * kNano;
  return kTwoPi * kSpeedOfLight * dlambda_nm * kNano / (lambda * lambda);
}

// D [ps/(nm km)] -> beta2 [s^2/m] at the given wavelength.
inline double dispersion_d_to_beta2(double d_ps_nm_km, double lambda_nm) {
  const double d_si = d_ps_nm_km * 1e-6;  // s/m^2
  const double lambda = lambda_nm * kNano;
  return -d_si * lambda * lambda / (kTwoPi * kSpeedOfLight);
}

inline double beta2_to_dispersion_d(double beta2, double lambda_nm) {
  const double lambda = lambda_nm * kNano;
  return -beta2 * kTwoPi * kSpeedOfLight / (lambda * lambda) * 1e6;
}

}  // namespace qfc::units

#include "qfc/core/dispersion.hpp"

#include <cmath>

#include "qfc/core/errors.hpp"
#include "qfc/core/units.hpp"

namespace qfc {
namespace {

constexpr double kBeta1PerPsKm = 1e-15;  // ps/km -> s/m
constexpr double kDPerPsNmKm = 1e-6;     // ps/(nm km) -> s/m^2
constexpr double kSPerPsNm2Km = 1e3;     // ps/(nm^2 km) -> s/m^3

// log1p(x) - x without the cancellation near x = 0.
double log1p_minus_x(double x) {
  if (std::abs(x) > 0.05) return std::log1p(x) - x;
  double term = x, sum = 0.0;
  for (int n = 2; n < 40; ++n) {
    term *= -x;
    const double t = term / n;  // (-1)^(n+1) x^n / n
    sum += t;
    if (std::abs(t) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// x/(1+x) + x - 2 log1p(x) = sum_{n>=3} (-1)^(n+1) (1 - 2/n) x^n
double slope_kernel(double x) {
  if (std::abs(x) > 0.05) return x / (1.0 + x) + x - 2.0 * std::log1p(x);
  double pw = x * x, sum = 0.0;
  for (int n = 3; n < 40; ++n) {
    pw *= x;  // x^n
    const double t = ((n + 1) % 2 == 0 ? 1.0 : -1.0) * (1.0 - 2.0 / n) * pw;
    sum += t;
    if (std::abs(t) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double group_delay(const DispersionSpec& spec, double lambda_nm) {
  const double dl = (lambda_nm - spec.reference_wavelength_nm) * units::kNano;
  const double length = spec.length_km * 1e3;
  return length * (spec.group_delay_per_length * kBeta1PerPsKm + spec.dispersion_d * kDPerPsNmKm * dl +
                   0.5 * spec.dispersion_slope * kSPerPsNm2Km * dl * dl);
}

std::vector<double> dispersion_phase(const DispersionSpec& spec, const FrequencyGrid& grid) {
  if (!(spec.length_km >= 0.0)) throw PreconditionError("dispersion_phase: length must be non-negative");
  for (std::size_t k : {std::size_t{0}, grid.count() - 1}) {
    if (std::abs(grid.wavelength_nm(k) - spec.reference_wavelength_nm) > kDispersionValidityNm)
      throw ValidityError("dispersion_phase: grid is more than 100 nm from the reference wavelength");
  }
  std::vector<double> phi(grid.count(), 0.0);
  if (spec.length_km == 0.0) return phi;

  const double c = units::kSpeedOfLight;
  const double wr = units::wavelength_nm_to_omega(spec.reference_wavelength_nm);
  const double length = spec.length_km * 1e3;
  const double b1 = spec.group_delay_per_length * kBeta1PerPsKm;
  const double d = spec.dispersion_d * kDPerPsNmKm;
  const double s = spec.dispersion_slope * kSPerPsNm2Km;
  const double two_pi_c = units::kTwoPi * c;
  for (std::size_t k = 0; k < grid.count(); ++k) {
    const double dw = (grid.center() - wr) + grid.offset(k);
    const double x = dw / wr;
    phi[k] = length * (b1 * dw + d * two_pi_c * log1p_minus_x(x) +
                       0.5 * s * (two_pi_c * two_pi_c / wr) * slope_kernel(x));
  }
  return phi;
}

}  // namespace qfc

#include <cmath>
#include <numbers>

#include "qfc/core/errors.hpp"
#include "qfc/core/fft.hpp"
#include "qfc/core/units.hpp"
#include "recon_common.hpp"

namespace qfc {

SidebandMap extract_sideband(const DelaySweepDataset& data, double min_explained) {
  if (!data.uniform_delays())
    throw PreconditionError("extract_sideband: delays are not uniform (resample first)");
  const auto& delays = data.delays_ps();
  const double shear = data.metadata().shear;
  const std::size_t n = delays.size();
  const double step = n > 1 ? (delays.back() - delays.front()) / static_cast<double>(n - 1) : 0.0;
  const double period = detail::beat_period_ps(shear);

  // Longest window of whole beat periods, each sample covering one step.
  const double periods = std::floor(static_cast<double>(n) * step / period * (1.0 + 1e-12));
  if (n < 3 || periods < 1.0)
    throw ConsistencyError("extract_sideband: delay sweep covers less than one beat period");
  const std::size_t keep = std::min(n, static_cast<std::size_t>(std::floor(periods * period / step * (1.0 + 1e-12))));

  SidebandMap sb{data.out_grid(), data.centers(), {}, {}, shear, 1.0, data.metadata().warnings};
  if (keep < n)
    sb.warnings.push_back("sideband window trimmed to " + std::to_string(static_cast<int>(periods)) +
                          " beat periods (" + std::to_string(keep) + " of " + std::to_string(n) + " delays)");

  const detail::BeatFit fit(delays, 0, keep, shear);
  sb.explained_fraction = detail::explained_fraction(data, fit, 0, keep, shear);
  if (sb.explained_fraction < min_explained)
    throw ConsistencyError("extract_sideband: only " + std::to_string(sb.explained_fraction) +
                           " of the delay-dependent power sits at the stated shear");

  const double a0 = data.metadata().amplitude;
  const double norm = 2.0 / (a0 * a0);
  const std::size_t nc = data.center_count(), nk = data.out_count();
  sb.coefficients.resize(nc, nk);
  sb.dc.resize(nc, nk);
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t k = 0; k < nk; ++k) {
      const Eigen::Vector3d coef = fit.fit(data.trace(c, k));
      sb.coefficients(c, k) = cplx(0.5 * coef[1], -0.5 * coef[2]) * norm;
      sb.dc(c, k) = coef[0] * norm;
    }
  }
  return sb;
}

DelaySpectrum delay_spectrum(const DelaySweepDataset& data, std::size_t center, std::size_t pad_factor) {
  if (center >= data.center_count()) throw DimensionError("delay_spectrum: center index out of range");
  if (!data.uniform_delays()) throw PreconditionError("delay_spectrum: delays are not uniform (resample first)");
  const std::size_t n = data.delay_count();
  if (n < 2) throw PreconditionError("delay_spectrum: need at least two delays");
  const std::size_t m = n * std::max<std::size_t>(1, pad_factor);
  const auto& delays = data.delays_ps();
  const double dtau = units::ps_to_s((delays.back() - delays.front()) / static_cast<double>(n - 1));
  const double tau0 = units::ps_to_s(delays.front());

  DelaySpectrum out;
  out.frequencies.resize(m);
  for (std::size_t q = 0; q < m; ++q) {
    const double shifted = static_cast<double>(q) - static_cast<double>(m / 2);
    out.frequencies[q] = 2.0 * std::numbers::pi * shifted / (static_cast<double>(m) * dtau);
  }
  out.values.resize(data.out_count(), m);
  FftPlan plan(m);
  std::vector<cplx> buf(m);
  for (std::size_t k = 0; k < data.out_count(); ++k) {
    std::fill(buf.begin(), buf.end(), cplx(0.0, 0.0));
    const double* tr = data.trace(center, k);
    for (std::size_t i = 0; i < n; ++i) buf[i] = tr[i];
    plan.forward(buf);
    for (std::size_t q = 0; q < m; ++q) {
      const std::size_t bin = (q + m - m / 2) % m;
      out.values(k, q) = buf[bin] * dtau * std::polar(1.0, -out.frequencies[q] * tau0);
    }
  }
  return out;
}

}  // namespace qfc

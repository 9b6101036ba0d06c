#include <algorithm>
#include <cmath>
#include <numbers>

#include "qfc/core/errors.hpp"
#include "qfc/core/units.hpp"
#include "recon_common.hpp"

namespace qfc {

namespace detail {

BeatFit::BeatFit(const std::vector<double>& delays_ps, std::size_t first, std::size_t count, double shear)
    : first_(first), count_(count) {
  Eigen::MatrixXd a(count, 3);
  for (std::size_t n = 0; n < count; ++n) {
    const double x = shear * units::ps_to_s(delays_ps[first + n]);
    a(n, 0) = 1.0;
    a(n, 1) = std::cos(x);
    a(n, 2) = std::sin(x);
  }
  const Eigen::Matrix3d normal = a.transpose() * a;
  if (std::abs(normal.determinant()) < 1e-12 * std::pow(static_cast<double>(count), 3))
    throw ConsistencyError("delay sweep does not resolve the beat (degenerate sampling at this shear)");
  pinv_ = normal.ldlt().solve(a.transpose());
}

Eigen::Vector3d BeatFit::fit(const double* trace) const {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  // Fixed summation order keeps results independent of threading.
  for (std::size_t n = 0; n < count_; ++n) c += pinv_.col(n) * trace[first_ + n];
  return c;
}

double beat_period_ps(double shear) { return units::s_to_ps(2.0 * std::numbers::pi / shear); }

double explained_fraction(const DelaySweepDataset& data, const BeatFit& fit, std::size_t first,
                          std::size_t count, double shear) {
  double total = 0.0, captured = 0.0;
  for (std::size_t c = 0; c < data.center_count(); ++c) {
    for (std::size_t k = 0; k < data.out_count(); ++k) {
      const double* tr = data.trace(c, k);
      double mean = 0.0;
      for (std::size_t n = 0; n < count; ++n) mean += tr[first + n];
      mean /= static_cast<double>(count);
      const Eigen::Vector3d coef = fit.fit(tr);
      for (std::size_t n = 0; n < count; ++n) {
        const double x = shear * units::ps_to_s(data.delays_ps()[first + n]);
        const double model = coef[0] + coef[1] * std::cos(x) + coef[2] * std::sin(x);
        total += (tr[first + n] - mean) * (tr[first + n] - mean);
        captured += (model - mean) * (model - mean);
      }
    }
  }
  return total > 0.0 ? std::min(1.0, captured / total) : 1.0;
}

}  // namespace detail

DelaySweepDataset resample_uniform(const DelaySweepDataset& data, std::size_t factor) {
  if (factor < 1) throw PreconditionError("resample_uniform: factor must be at least 1");
  const auto& delays = data.delays_ps();
  const double shear = data.metadata().shear;
  const std::size_t n = delays.size();
  const double span = delays.back() - delays.front();
  if (n < 3 || span < detail::beat_period_ps(shear) * (1.0 - 1e-12))
    throw ConsistencyError("resample_uniform: delay sweep covers less than one beat period");
  if (factor == 1 && data.uniform_delays()) return data;

  const detail::BeatFit fit(delays, 0, n, shear);
  const double frac = detail::explained_fraction(data, fit, 0, n, shear);
  if (frac < kMinExplainedFraction)
    throw ConsistencyError("resample_uniform: only " + std::to_string(frac) +
                           " of the delay-dependent power sits at the stated shear");

  const double step = span / static_cast<double>(n - 1) / static_cast<double>(factor);
  const std::size_t m = (n - 1) * factor + 1;
  std::vector<double> out_delays(m);
  for (std::size_t i = 0; i < m; ++i) out_delays[i] = delays.front() + static_cast<double>(i) * step;
  out_delays.back() = delays.back();

  std::vector<double> cs(m), sn(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = shear * units::ps_to_s(out_delays[i]);
    cs[i] = std::cos(x);
    sn[i] = std::sin(x);
  }
  const std::size_t nc = data.center_count(), nk = data.out_count();
  std::vector<double> values(nc * nk * m);
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t k = 0; k < nk; ++k) {
      const Eigen::Vector3d coef = fit.fit(data.trace(c, k));
      double* dst = values.data() + (c * nk + k) * m;
      // Fitted traces can dip a rounding error below zero near dark samples.
      for (std::size_t i = 0; i < m; ++i) dst[i] = std::max(0.0, coef[0] + coef[1] * cs[i] + coef[2] * sn[i]);
    }
  }
  return DelaySweepDataset(data.out_grid(), data.centers(), std::move(out_delays), std::move(values),
                           data.metadata());
}

}  // namespace qfc

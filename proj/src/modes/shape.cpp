#include "qfc/modes/shape.hpp"

#include <cmath>
#include <numbers>

#include "qfc/core/errors.hpp"

namespace qfc {

namespace {

double wrap(double x) { return std::remainder(x, 2 * std::numbers::pi); }

}  // namespace

PhaseFlatness phase_flatness(const GreensFunction& g, double threshold) {
  const auto& m = g.values();
  const double peak = m.cwiseAbs().maxCoeff();
  PhaseFlatness r;
  if (!(peak > 0.0)) return r;
  cplx sum(0.0, 0.0);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (std::abs(m.data()[i]) >= threshold * peak) sum += m.data()[i];
  const double ref = std::arg(sum);
  double ss = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (std::abs(m.data()[i]) < threshold * peak) continue;
    const double d = std::abs(wrap(std::arg(m.data()[i]) - ref));
    r.max_deviation = std::max(r.max_deviation, d);
    ss += d * d;
    ++r.points;
  }
  r.rms_deviation = std::sqrt(ss / static_cast<double>(r.points));
  return r;
}

QuadraticPhaseFit quadratic_phase(const GreensFunction& g, GreensAxis axis, std::size_t index, double threshold) {
  const bool along_in = axis == GreensAxis::kAlongInput;
  const FrequencyGrid& grid = along_in ? g.in_grid() : g.out_grid();
  const std::size_t limit = along_in ? g.out_grid().count() : g.in_grid().count();
  if (index >= limit) throw PreconditionError("quadratic_phase: index outside the grid");
  const Eigen::VectorXcd line = along_in ? Eigen::VectorXcd(g.values().row(index).transpose())
                                         : Eigen::VectorXcd(g.values().col(index));
  Eigen::Index peak_at = 0;
  const double peak = line.cwiseAbs().maxCoeff(&peak_at);
  QuadraticPhaseFit fit;
  if (!(peak > 0.0)) return fit;
  Eigen::Index lo = peak_at, hi = peak_at;
  while (lo > 0 && std::abs(line[lo - 1]) >= threshold * peak) --lo;
  while (hi + 1 < line.size() && std::abs(line[hi + 1]) >= threshold * peak) ++hi;
  const Eigen::Index n = hi - lo + 1;
  fit.points = static_cast<std::size_t>(n);
  if (n < 3) return fit;

  Eigen::VectorXd phase(n), x(n);
  phase[0] = std::arg(line[lo]);
  for (Eigen::Index i = 0; i < n; ++i) {
    x[i] = grid.offset(static_cast<std::size_t>(lo + i));
    if (i > 0) phase[i] = phase[i - 1] + wrap(std::arg(line[lo + i]) - std::arg(line[lo + i - 1]));
  }
  // Scale x to O(1) for conditioning.
  const double s = std::max(std::abs(x[0]), std::abs(x[n - 1]));
  Eigen::MatrixXd a(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = x[i] / s;
    a(i, 0) = 1.0;
    a(i, 1) = u;
    a(i, 2) = u * u;
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(phase);
  fit.c0 = c[0];
  fit.c1 = c[1] / s;
  fit.c2 = c[2] / (s * s);
  const Eigen::VectorXd model = a * c;
  fit.rms_residual = std::sqrt((phase - model).squaredNorm() / static_cast<double>(n));
  fit.phase_span = model.maxCoeff() - model.minCoeff();
  return fit;
}

GaussianShape gaussian_shape(const SpectralMode& f) {
  const auto& a = f.amplitude();
  const auto& grid = f.grid();
  double w = 0.0, m1 = 0.0, m2 = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double p = std::norm(a[k]);
    const double x = grid.offset(static_cast<std::size_t>(k));
    w += p;
    m1 += p * x;
    m2 += p * x * x;
  }
  GaussianShape r;
  if (!(w > 0.0)) return r;
  const double mean = m1 / w;
  const double var = std::max(m2 / w - mean * mean, 0.0);
  r.center = grid.center() + mean;
  // |f|^2 with r.m.s. width sigma has intensity FWHM 2 sqrt(2 ln 2) sigma.
  r.fwhm = 2.0 * std::sqrt(2.0 * std::log(2.0) * var);

  Eigen::VectorXd model(a.size());
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double x = grid.offset(static_cast<std::size_t>(k)) - mean;
    model[k] = var > 0.0 ? std::exp(-x * x / (4.0 * var)) : 0.0;
  }
  const Eigen::VectorXd mag = a.cwiseAbs();
  const double scale = model.squaredNorm() > 0.0 ? mag.dot(model) / model.squaredNorm() : 0.0;
  r.mismatch = (mag - scale * model).norm() / (scale * model).norm();

  Eigen::Index peak_at = 0;
  const double peak = mag.maxCoeff(&peak_at);
  const double ref = std::arg(a[peak_at]);
  for (Eigen::Index k = 0; k < a.size(); ++k)
    if (mag[k] * mag[k] >= 0.5 * peak * peak)
      r.max_phase_deviation = std::max(r.max_phase_deviation, std::abs(wrap(std::arg(a[k]) - ref)));
  return r;
}

}  // namespace qfc

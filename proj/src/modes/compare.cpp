#include "qfc/modes/compare.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "qfc/core/errors.hpp"
#include "qfc/core/units.hpp"

namespace qfc {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double wrap(double x) { return std::remainder(x, 2.0 * std::numbers::pi); }

std::vector<std::size_t> center_columns(const FrequencyGrid& in, const std::vector<double>& centers) {
  std::vector<std::size_t> cols;
  for (double c : centers) {
    const double f = in.fractional_index(c);
    if (std::abs(f - std::round(f)) > 1e-6 || f < -0.5 || f > static_cast<double>(in.count()) - 0.5)
      throw PreconditionError("compare: probe centers are not points of the truth grid (resample first)");
    cols.push_back(static_cast<std::size_t>(std::lround(f)));
  }
  return cols;
}

// Slope (ps/nm) of the truth group delay at the centers, from the phase
// difference between the neighbouring grid columns, band averaged with
// |G|^2 weights the same way the reconstruction averages its samples.
std::optional<LinearFit> truth_delay_fit(const GreensFunction& truth, const std::vector<std::size_t>& cols,
                                         const std::vector<double>& centers) {
  const auto& g = truth.values();
  const double two_delta = 2.0 * truth.in_grid().spacing();
  std::vector<double> x, y;
  double prev = kNaN;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const std::size_t j = cols[c];
    if (j == 0 || j + 1 >= truth.in_grid().count()) continue;
    const cplx s = (g.col(j + 1).array() * g.col(j - 1).conjugate().array()).sum();
    if (std::abs(s) == 0.0) continue;
    const double psi = std::isnan(prev) ? std::arg(s) : prev + wrap(std::arg(s) - prev);
    prev = psi;
    x.push_back(units::omega_to_wavelength_nm(centers[c]));
    y.push_back(units::s_to_ps(psi / two_delta));
  }
  if (x.size() < 2) return std::nullopt;
  return fit_line(x, y);
}

// Conversion efficiency of a mode given on the center lattice.
double lattice_efficiency(const Eigen::MatrixXcd& g, const Eigen::VectorXcd& f, double d_center, double d_out) {
  const Eigen::VectorXcd out = g * f * d_center;
  return out.squaredNorm() * d_out;
}

}  // namespace

ReconstructedGreens sample_truth(const GreensFunction& truth, const std::vector<double>& centers, double threshold) {
  const auto cols = center_columns(truth.in_grid(), centers);
  const Eigen::Index nk = truth.out_grid().count(), nc = cols.size();
  ReconstructedGreens r{.out_grid = truth.out_grid(), .centers = centers};
  r.magnitude.resize(nk, nc);
  r.phase = Eigen::MatrixXd::Constant(nk, nc, kNaN);
  r.group_delay = Eigen::MatrixXd::Constant(nk, nc, kNaN);
  r.mask = BoolMatrix::Constant(nk, nc, false);
  r.shear = truth.in_grid().spacing();
  r.delay_fit = truth_delay_fit(truth, cols, centers);
  for (Eigen::Index k = 0; k < nk; ++k) {
    double row_max = 0.0;
    for (Eigen::Index c = 0; c < nc; ++c) {
      r.magnitude(k, c) = std::abs(truth.values()(k, cols[c]));
      row_max = std::max(row_max, r.magnitude(k, c));
    }
    if (!(row_max > 0.0)) continue;
    double sum = 0.0;
    int count = 0;
    for (Eigen::Index c = 0; c < nc; ++c) {
      if (r.magnitude(k, c) < threshold * row_max) continue;
      r.mask(k, c) = true;
      r.phase(k, c) = std::arg(truth.values()(k, cols[c]));
      sum += r.phase(k, c);
      ++count;
    }
    for (Eigen::Index c = 0; c < nc; ++c)
      if (r.mask(k, c)) r.phase(k, c) -= sum / count;
  }
  return r;
}

GaugeMetrics compare_gauge_invariant(const ReconstructedGreens& recon, const GreensFunction& truth) {
  if (recon.out_grid != truth.out_grid())
    throw PreconditionError("compare: reconstruction and truth use different output grids (resample first)");
  const auto cols = center_columns(truth.in_grid(), recon.centers);
  const Eigen::Index nk = recon.magnitude.rows(), nc = recon.magnitude.cols();
  if (nk != static_cast<Eigen::Index>(truth.out_grid().count()) || nc != static_cast<Eigen::Index>(cols.size()))
    throw DimensionError("compare: reconstruction matrices do not match its grids");
  const auto& g = truth.values();

  GaugeMetrics m;
  double ss = 0.0, ab = 0.0, aa = 0.0, bb = 0.0;
  for (Eigen::Index k = 0; k < nk; ++k) {
    // Per-row offset: argument of the mean residual phasor.
    cplx mean(0.0, 0.0);
    for (Eigen::Index c = 0; c < nc; ++c)
      if (recon.mask(k, c) && std::isfinite(recon.phase(k, c)))
        mean += std::polar(1.0, recon.phase(k, c) - std::arg(g(k, cols[c])));
    if (std::abs(mean) == 0.0) continue;
    const double offset = std::arg(mean);
    for (Eigen::Index c = 0; c < nc; ++c) {
      if (!recon.mask(k, c) || !std::isfinite(recon.phase(k, c))) continue;
      const double d = wrap(recon.phase(k, c) - std::arg(g(k, cols[c])) - offset);
      ss += d * d;
      const double a = recon.magnitude(k, c), b = std::abs(g(k, cols[c]));
      ab += a * b;
      aa += a * a;
      bb += b * b;
      ++m.compared_points;
    }
  }
  if (m.compared_points == 0) throw ConsistencyError("compare: reconstruction has no valid samples");
  m.phase_rmse = std::sqrt(ss / static_cast<double>(m.compared_points));
  m.magnitude_correlation = (aa > 0.0 && bb > 0.0) ? ab / std::sqrt(aa * bb) : 0.0;

  const auto tf = truth_delay_fit(truth, cols, recon.centers);
  m.truth_slope = tf ? tf->slope : kNaN;
  m.recon_slope = recon.delay_fit ? recon.delay_fit->slope : kNaN;
  m.slope_error = m.recon_slope - m.truth_slope;

  // Efficiency of a few Gaussian test modes on the center lattice, both
  // operators restricted to the compared support. The reconstruction is
  // rescaled by the least-squares magnitude factor.
  const double scale = aa > 0.0 ? ab / aa : 0.0;
  Eigen::MatrixXcd gr = Eigen::MatrixXcd::Zero(nk, nc), gt = Eigen::MatrixXcd::Zero(nk, nc);
  for (Eigen::Index c = 0; c < nc; ++c)
    for (Eigen::Index k = 0; k < nk; ++k)
      if (recon.mask(k, c) && std::isfinite(recon.phase(k, c))) {
        gr(k, c) = std::polar(scale * recon.magnitude(k, c), recon.phase(k, c));
        gt(k, c) = g(k, cols[c]);
      }
  const double dc = nc > 1 ? std::abs(recon.centers[1] - recon.centers[0]) : truth.in_grid().spacing();
  const double d_out = truth.out_grid().spacing();
  for (double pos : {0.3, 0.5, 0.7}) {
    Eigen::VectorXcd f(nc);
    const double mid = pos * static_cast<double>(nc - 1), width = std::max(1.0, 0.15 * static_cast<double>(nc));
    for (Eigen::Index c = 0; c < nc; ++c) {
      const double x = (static_cast<double>(c) - mid) / width;
      f[c] = std::polar(std::exp(-x * x), 0.4 * x * x);
    }
    f /= std::sqrt(f.squaredNorm() * dc);
    const double et = lattice_efficiency(gt, f, dc, d_out);
    const double er = lattice_efficiency(gr, f, dc, d_out);
    if (et > 0.0) m.efficiency_error = std::max(m.efficiency_error, std::abs(er - et) / et);
  }
  return m;
}

}  // namespace qfc

#include "qfc/recon/phase.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qfc/core/errors.hpp"
#include "qfc/core/units.hpp"

namespace qfc {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double wrap(double x) { return std::remainder(x, 2.0 * std::numbers::pi); }

bool in_intervals(const std::vector<MaskInterval>& intervals, MaskAxis axis, double lambda_nm) {
  for (const auto& m : intervals)
    if (m.axis == axis && lambda_nm >= std::min(m.lo_nm, m.hi_nm) && lambda_nm <= std::max(m.lo_nm, m.hi_nm))
      return true;
  return false;
}

// Half-open [begin, end) index ranges of consecutive true entries.
std::vector<std::pair<Eigen::Index, Eigen::Index>> runs_of(const BoolMatrix& mask, Eigen::Index row) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> runs;
  Eigen::Index c = 0;
  const Eigen::Index n = mask.cols();
  while (c < n) {
    if (!mask(row, c)) {
      ++c;
      continue;
    }
    Eigen::Index e = c;
    while (e < n && mask(row, e)) ++e;
    runs.emplace_back(c, e);
    c = e;
  }
  return runs;
}

}  // namespace

PhaseDifferenceMap phase_differences(const SidebandMap& sb, const PhaseOptions& options) {
  if (!(options.threshold > 0.0 && options.threshold < 1.0))
    throw PreconditionError("phase_differences: threshold must lie in (0, 1)");
  if (!(options.global_floor >= 0.0 && options.global_floor < 1.0))
    throw PreconditionError("phase_differences: global floor must lie in [0, 1)");
  const Eigen::Index nc = sb.coefficients.rows(), nk = sb.coefficients.cols();
  const Eigen::MatrixXd mag = sb.coefficients.cwiseAbs();
  const double global_max = mag.size() > 0 ? mag.maxCoeff() : 0.0;

  PhaseDifferenceMap pd{sb.out_grid, sb.centers, Eigen::MatrixXd::Constant(nk, nc, kNaN),
                        Eigen::MatrixXd::Zero(nk, nc), BoolMatrix::Constant(nk, nc, false),
                        std::vector<bool>(nk, false), std::vector<bool>(nk, false), sb.shear, options,
                        sb.warnings};
  std::vector<bool> center_excluded(nc);
  for (Eigen::Index c = 0; c < nc; ++c)
    center_excluded[c] = in_intervals(options.mask_intervals, MaskAxis::kIn, units::omega_to_wavelength_nm(sb.centers[c]));

  for (Eigen::Index k = 0; k < nk; ++k) {
    if (in_intervals(options.mask_intervals, MaskAxis::kOut, sb.out_grid.wavelength_nm(k))) continue;
    const double row_max = mag.col(k).maxCoeff();
    if (!(row_max > 0.0)) continue;
    const double cut = std::max(options.threshold * row_max, options.global_floor * global_max);
    for (Eigen::Index c = 0; c < nc; ++c)
      pd.mask(k, c) = !center_excluded[c] && mag(c, k) >= cut && mag(c, k) > 0.0;

    const auto runs = runs_of(pd.mask, k);
    pd.row_valid[k] = !runs.empty();
    pd.row_segmented[k] = runs.size() > 1;
    for (const auto& [b, e] : runs) {
      double prev = std::arg(sb.coefficients(b, k));
      pd.delta_phi(k, b) = prev;
      pd.weight(k, b) = mag(b, k);
      for (Eigen::Index c = b + 1; c < e; ++c) {
        prev += wrap(std::arg(sb.coefficients(c, k)) - prev);
        pd.delta_phi(k, c) = prev;
        pd.weight(k, c) = mag(c, k);
      }
    }
  }
  return pd;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("fit_line: x and y differ in length");
  if (x.size() < 2) throw PreconditionError("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw PreconditionError("fit_line: x values are all equal");
  LinearFit f;
  f.points = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / n);
  f.slope_stderr = x.size() > 2 ? std::sqrt(ss / (n - 2.0) / sxx) : 0.0;
  return f;
}

GroupDelayMap group_delay_map(const PhaseDifferenceMap& pd) {
  const Eigen::Index nk = pd.delta_phi.rows(), nc = pd.delta_phi.cols();
  const double to_ps = units::s_to_ps(1.0 / pd.shear);
  GroupDelayMap g;
  g.tau_ps = pd.delta_phi * to_ps;
  g.center_wavelength_nm.resize(nc);
  g.center_tau_ps.assign(nc, kNaN);
  g.center_spread_ps.assign(nc, kNaN);
  g.center_valid.assign(nc, false);

  std::vector<double> mean_phase(nc, kNaN);
  for (Eigen::Index c = 0; c < nc; ++c) {
    g.center_wavelength_nm[c] = units::omega_to_wavelength_nm(pd.centers[c]);
    cplx sum(0.0, 0.0);
    double wsum = 0.0;
    for (Eigen::Index k = 0; k < nk; ++k) {
      if (!pd.mask(k, c)) continue;
      sum += pd.weight(k, c) * std::polar(1.0, pd.delta_phi(k, c));
      wsum += pd.weight(k, c);
    }
    if (!(wsum > 0.0)) continue;
    const double psi = std::arg(sum);
    double var = 0.0;
    for (Eigen::Index k = 0; k < nk; ++k) {
      if (!pd.mask(k, c)) continue;
      const double d = wrap(pd.delta_phi(k, c) - psi);
      var += pd.weight(k, c) * d * d;
    }
    mean_phase[c] = psi;
    g.center_spread_ps[c] = std::sqrt(var / wsum) * to_ps;
    g.center_valid[c] = true;
  }

  // Unwrap the band-averaged phase across valid centers.
  std::vector<double> xs, ys;
  double prev = kNaN;
  for (Eigen::Index c = 0; c < nc; ++c) {
    if (!g.center_valid[c]) continue;
    const double v = std::isnan(prev) ? mean_phase[c] : prev + wrap(mean_phase[c] - prev);
    prev = v;
    g.center_tau_ps[c] = v * to_ps;
    xs.push_back(g.center_wavelength_nm[c]);
    ys.push_back(g.center_tau_ps[c]);
  }
  if (xs.size() >= 2) g.fit = fit_line(xs, ys);
  return g;
}

ReconstructedGreens reconstruct_without_phase(const PhaseDifferenceMap& pd, const SidebandMap& sb, MagnitudeMode mode) {
  const std::size_t nc = pd.centers.size();
  const Eigen::Index nk = pd.delta_phi.rows();
  if (static_cast<std::size_t>(sb.dc.rows()) != nc || sb.dc.cols() != nk)
    throw DimensionError("reconstruction: sideband map does not match the phase map");
  ReconstructedGreens r{.out_grid = pd.out_grid, .centers = pd.centers};
  r.shear = pd.shear;
  r.mask = pd.mask;
  r.mask_intervals = pd.options.mask_intervals;
  r.warnings = pd.warnings;
  r.magnitude.resize(nk, nc);
  r.phase = Eigen::MatrixXd::Constant(nk, nc, kNaN);
  const GroupDelayMap gd = group_delay_map(pd);
  r.group_delay = gd.tau_ps;
  if (gd.fit.points >= 2) r.delay_fit = gd.fit;
  for (Eigen::Index k = 0; k < nk; ++k)
    for (std::size_t c = 0; c < nc; ++c) {
      const double i0 = std::max(sb.dc(c, k), 0.0);
      if (mode == MagnitudeMode::kDcHalf) {
        r.magnitude(k, c) = std::sqrt(0.5 * i0);
      } else {
        const double disc = std::sqrt(std::max(i0 * i0 - 4.0 * std::norm(sb.coefficients(c, k)), 0.0));
        r.magnitude(k, c) = 0.5 * (std::sqrt(0.5 * (i0 + disc)) + std::sqrt(std::max(0.5 * (i0 - disc), 0.0)));
      }
    }
  return r;
}

ReconstructedGreens integrate_phase(const PhaseDifferenceMap& pd, const SidebandMap& sb, MagnitudeMode mode) {
  const std::size_t nc = pd.centers.size();
  const Eigen::Index nk = pd.delta_phi.rows();
  if (nc < 2) throw PreconditionError("integrate_phase: need at least two probe centers");
  const double step = (pd.centers.back() - pd.centers.front()) / static_cast<double>(nc - 1);
  for (std::size_t c = 1; c < nc; ++c)
    if (std::abs(pd.centers[c] - pd.centers[c - 1] - step) > 1e-6 * std::abs(step))
      throw PreconditionError("integrate_phase: probe centers are not uniformly spaced (resample centers first)");
  if (!(step > 0.0) || step > pd.shear * (1.0 + 1e-9))
    throw PreconditionError("integrate_phase: probe center spacing exceeds the shear");

  ReconstructedGreens r = reconstruct_without_phase(pd, sb, mode);
  for (Eigen::Index k = 0; k < nk; ++k) {
    for (const auto& [b, e] : runs_of(pd.mask, k)) {
      double phi = 0.0, sum = 0.0;
      r.phase(k, b) = 0.0;
      for (Eigen::Index c = b + 1; c < e; ++c) {
        phi += 0.5 * (pd.delta_phi(k, c - 1) + pd.delta_phi(k, c)) / pd.shear * step;
        r.phase(k, c) = phi;
        sum += phi;
      }
      const double mean = sum / static_cast<double>(e - b);
      for (Eigen::Index c = b; c < e; ++c) r.phase(k, c) -= mean;
    }
  }
  return r;
}

}  // namespace qfc

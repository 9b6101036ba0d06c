#include "qfc/measure/probe.hpp"

#include <cmath>

#include "qfc/core/errors.hpp"
#include "qfc/core/units.hpp"

namespace qfc {
namespace {

constexpr double kOnGridTolerance = 1e-6;  // in grid cells

}  // namespace

TwoToneProbe snap_probe(const FrequencyGrid& in_grid, double center, double shear, double delay_ps,
                        double amplitude) {
  if (!(shear > 0.0)) throw PreconditionError("snap_probe: shear must be positive");
  const long cells = std::max(1L, std::lround(shear / in_grid.spacing()));
  const long lo = std::lround(in_grid.fractional_index(center) - 0.5 * static_cast<double>(cells));
  const long hi = lo + cells;
  if (lo < 0 || hi >= static_cast<long>(in_grid.count()))
    throw PreconditionError("snap_probe: probe tones fall outside the input grid");
  TwoToneProbe p;
  p.center = in_grid.center() + 0.5 * (in_grid.offset(lo) + in_grid.offset(hi));
  p.shear = static_cast<double>(cells) * in_grid.spacing();
  p.delay_ps = delay_ps;
  p.amplitude = amplitude;
  return p;
}

ToneIndices tone_indices(const FrequencyGrid& in_grid, const TwoToneProbe& probe) {
  if (!(probe.shear > 0.0)) throw PreconditionError("two-tone probe: shear must be positive");
  const double c = in_grid.fractional_index(probe.center);
  const double half = 0.5 * probe.shear / in_grid.spacing();
  const double lo = c - half, hi = c + half;
  if (std::abs(lo - std::round(lo)) > kOnGridTolerance || std::abs(hi - std::round(hi)) > kOnGridTolerance)
    throw PreconditionError("two-tone probe: tones are not on grid points (snap the probe first)");
  const long l = std::lround(lo), h = std::lround(hi);
  if (l < 0 || h >= static_cast<long>(in_grid.count()))
    throw PreconditionError("two-tone probe: tones fall outside the input grid");
  return {static_cast<std::size_t>(l), static_cast<std::size_t>(h)};
}

Eigen::VectorXd output_intensity(const GreensFunction& g, const TwoToneProbe& probe) {
  const ToneIndices t = tone_indices(g.in_grid(), probe);
  const auto& m = g.values();
  const double half_phase = 0.5 * probe.shear * units::ps_to_s(probe.delay_ps);
  const cplx ep = std::polar(1.0, half_phase), em = std::conj(ep);
  const double scale = 0.5 * probe.amplitude * probe.amplitude;
  Eigen::VectorXd out(m.rows());
  for (Eigen::Index k = 0; k < m.rows(); ++k)
    out[k] = scale * std::norm(m(k, t.plus) * ep + m(k, t.minus) * em);
  return out;
}

}  // namespace qfc

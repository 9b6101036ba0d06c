#include <algorithm>
#include <cmath>
#include <numbers>

#include "qfc/core/errors.hpp"
#include "qfc/core/units.hpp"
#include "qfc/sim/converter.hpp"
#include "sim_common.hpp"

namespace qfc {

double ConverterGreens::unitarity_defect() const {
  if (!through) throw PreconditionError("unitarity_defect: the unconverted block was not computed");
  const GreensFunction* blocks[] = {&*through, &converted};
  return qfc::unitarity_defect(blocks);
}

double coupling_at(const BsfwmSpec& spec, double z) {
  const auto& prof = spec.coupling_profile;
  if (prof.empty()) return 1.0;
  if (prof.size() == 1 || spec.active_length_m <= 0.0) return prof.front();
  const double x = std::clamp(z / spec.active_length_m, 0.0, 1.0) * static_cast<double>(prof.size() - 1);
  const std::size_t i = std::min(prof.size() - 2, static_cast<std::size_t>(x));
  const double f = x - static_cast<double>(i);
  return prof[i] * (1.0 - f) + prof[i + 1] * f;
}

double effective_length(const BsfwmSpec& spec) {
  const auto& prof = spec.coupling_profile;
  if (prof.empty()) return spec.active_length_m;
  if (prof.size() == 1) return prof.front() * spec.active_length_m;
  // Trapezoid rule is exact for the piecewise-linear profile.
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < prof.size(); ++i) s += 0.5 * (prof[i] + prof[i + 1]);
  return s * spec.active_length_m / static_cast<double>(prof.size() - 1);
}

namespace detail {

void check_spec(const BsfwmSpec& spec, const FrequencyGrid& in_grid, const FrequencyGrid& out_grid) {
  if (!(spec.coupling >= 0.0)) throw PreconditionError("BsfwmSpec: coupling must be non-negative");
  if (!(spec.active_length_m >= 0.0)) throw PreconditionError("BsfwmSpec: active length must be non-negative");
  for (double v : spec.coupling_profile)
    if (!(v >= 0.0) || !std::isfinite(v)) throw PreconditionError("BsfwmSpec: coupling profile must be finite and non-negative");
  if (!out_grid.contains(in_grid.center() + spec.shift))
    throw PreconditionError("BsfwmSpec: shift does not map the input grid center into the output grid");
}

double peak_conversion_estimate(const BsfwmSpec& spec) {
  const double ap = spec.pump_p.rate().real(), aq = spec.pump_q.rate().real();
  const double tp = units::ps_to_s(spec.pump_p.delay_ps), tq = units::ps_to_s(spec.pump_q.delay_ps);
  const double t_peak = (ap * tp + aq * tq) / (ap + aq);
  const double m = std::abs(pump_product(spec.pump_p, spec.pump_q, t_peak));
  const double theta = spec.coupling * m * effective_length(spec);
  const double s = std::sin(std::min(theta, std::numbers::pi / 2));
  return s * s;
}

void check_first_order(const BsfwmSpec& spec, const char* who) {
  if (peak_conversion_estimate(spec) >= 0.05)
    throw ValidityError(std::string(who) + ": coupling too strong for first-order theory (peak conversion >= 5%)");
}

std::vector<double> band_wavenumbers(const FrequencyGrid& grid, double walkoff_ps_per_m,
                                     const DispersionSpec& band, double length_m) {
  std::vector<double> k(grid.count(), 0.0);
  const double w = walkoff_ps_per_m * units::kPico;
  std::vector<double> phi;
  if (!band.is_null() && length_m > 0.0) phi = dispersion_phase(band, grid);
  for (std::size_t i = 0; i < grid.count(); ++i) {
    k[i] = grid.offset(i) * w;
    if (!phi.empty()) k[i] += phi[i] / length_m;
  }
  return k;
}

}  // namespace detail

ConverterGreens compose_chain(const ConverterChain& chain, ConverterGreens active) {
  const FrequencyGrid& in_grid = active.converted.in_grid();
  const FrequencyGrid& out_grid = active.converted.out_grid();
  if (!chain.pre.is_null()) {
    const auto phi = dispersion_phase(chain.pre, in_grid);
    active.converted = active.converted.with_input_phase(phi);
    if (active.through) active.through = active.through->with_input_phase(phi);
  }
  if (!chain.post.is_null()) {
    const auto chi = dispersion_phase(chain.post, out_grid);
    active.converted = active.converted.with_output_phase(chi);
  }
  return active;
}

ConverterGreens chain_greens(const ConverterChain& chain, const FrequencyGrid& in_grid,
                             const FrequencyGrid& out_grid, SimModel model, double dz_m,
                             const SimOptions& opts) {
  switch (model) {
    case SimModel::kClosedForm:
      return compose_chain(chain, gaussian_pump_greens(chain.active, in_grid, out_grid, opts));
    case SimModel::kBorn:
      return compose_chain(chain, born_oracle_greens(chain.active, in_grid, out_grid, opts));
    case SimModel::kSplitStep:
      return compose_chain(chain, split_step_greens(chain.active, in_grid, out_grid, dz_m, opts));
  }
  throw PreconditionError("chain_greens: unknown model");
}

}  // namespace qfc

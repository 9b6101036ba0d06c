#include <algorithm>
#include <cmath>
#include <numbers>

#include "qfc/core/errors.hpp"
#include "qfc/core/parallel.hpp"
#include "qfc/core/units.hpp"
#include "qfc/sim/converter.hpp"
#include "sim_common.hpp"

namespace qfc {
namespace {

// Largest phase advance of the integrand per quadrature interval.
constexpr double kMaxPhasePerInterval = 0.05;

}  // namespace

ConverterGreens born_oracle_greens(const BsfwmSpec& spec, const FrequencyGrid& in_grid,
                                   const FrequencyGrid& out_grid, const SimOptions& opts) {
  detail::check_spec(spec, in_grid, out_grid);
  detail::check_first_order(spec, "born_oracle_greens");

  const double length = spec.active_length_m;
  const std::size_t n_in = in_grid.count(), n_out = out_grid.count();
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n_out, n_in);
  ConverterGreens out{GreensFunction::zeros(out_grid, in_grid), std::nullopt};

  const auto ka = detail::band_wavenumbers(in_grid, spec.walkoff_in, spec.band_dispersion_in, length);
  const auto kb = detail::band_wavenumbers(out_grid, spec.walkoff_out, spec.band_dispersion_out, length);
  const double wa = spec.walkoff_in * units::kPico, wb = spec.walkoff_out * units::kPico;

  if (opts.include_through) {
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n_in, n_in);
    for (std::size_t j = 0; j < n_in; ++j)
      t(j, j) = std::polar(1.0 / in_grid.spacing(), ka[j] * length - in_grid.offset(j) * wa * length);
    out.through = GreensFunction(in_grid, in_grid, std::move(t));
  }
  if (length == 0.0 || spec.coupling == 0.0) return out;

  // Composite Simpson nodes: at least the requested count, refined until the
  // integrand phase advances by at most kMaxPhasePerInterval per interval.
  const double ka_max = std::abs(*std::max_element(ka.begin(), ka.end(), [](double x, double y) { return std::abs(x) < std::abs(y); }));
  const double kb_max = std::abs(*std::max_element(kb.begin(), kb.end(), [](double x, double y) { return std::abs(x) < std::abs(y); }));
  std::size_t intervals = std::max<std::size_t>(opts.min_quadrature_nodes, 3) - 1;
  intervals = std::max<std::size_t>(intervals, static_cast<std::size_t>(std::ceil((ka_max + kb_max) * length / kMaxPhasePerInterval)));
  if (intervals % 2 == 1) ++intervals;
  const double h = length / static_cast<double>(intervals);

  std::vector<double> weights(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double simpson = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    weights[i] = simpson * h / 3.0 * coupling_at(spec, static_cast<double>(i) * h);
  }

  const cplx prefactor = cplx(0.0, spec.coupling) / std::sqrt(2.0 * std::numbers::pi);
  parallel_for(n_in, opts.threads, [&](std::size_t j) {
    const double in_frame = -in_grid.offset(j) * wa * 0.5 * length;
    for (std::size_t k = 0; k < n_out; ++k) {
      const double delta = ka[j] - kb[k];
      const cplx step = std::polar(1.0, delta * h);
      cplx e(1.0, 0.0), sum(0.0, 0.0);
      for (std::size_t i = 0; i <= intervals; ++i) {
        sum += weights[i] * e;
        e *= step;
      }
      const double out_phase = kb[k] * length - out_grid.offset(k) * wb * 0.5 * length;
      const double nu = detail::pump_detuning(out_grid, k, in_grid, j, spec.shift);
      g(k, j) = prefactor * pump_product_spectrum(spec.pump_p, spec.pump_q, nu) * sum *
                std::polar(1.0, out_phase + in_frame);
    }
  });
  out.converted = GreensFunction(out_grid, in_grid, std::move(g));
  return out;
}

}  // namespace qfc

#include <cmath>
#include <numbers>

#include "qfc/core/errors.hpp"
#include "qfc/core/parallel.hpp"
#include "qfc/core/units.hpp"
#include "qfc/sim/converter.hpp"
#include "sim_common.hpp"

namespace qfc {

ConverterGreens gaussian_pump_greens(const BsfwmSpec& spec, const FrequencyGrid& in_grid,
                                     const FrequencyGrid& out_grid, const SimOptions& opts) {
  if (spec.walkoff_in != 0.0 || spec.walkoff_out != 0.0 || !spec.band_dispersion_in.is_null() ||
      !spec.band_dispersion_out.is_null())
    throw ValidityError(
        "gaussian_pump_greens: closed form requires zero walk-off and band dispersion; "
        "use split_step_greens or born_oracle_greens");
  detail::check_spec(spec, in_grid, out_grid);
  detail::check_first_order(spec, "gaussian_pump_greens");

  const cplx prefactor =
      cplx(0.0, spec.coupling * effective_length(spec)) / std::sqrt(2.0 * std::numbers::pi);
  Eigen::MatrixXcd g(out_grid.count(), in_grid.count());
  parallel_for(in_grid.count(), opts.threads, [&](std::size_t j) {
    for (std::size_t k = 0; k < out_grid.count(); ++k) {
      const double nu = detail::pump_detuning(out_grid, k, in_grid, j, spec.shift);
      g(k, j) = prefactor * pump_product_spectrum(spec.pump_p, spec.pump_q, nu);
    }
  });

  ConverterGreens out{GreensFunction(out_grid, in_grid, std::move(g)), std::nullopt};
  if (opts.include_through) out.through = GreensFunction::identity(in_grid);
  return out;
}

}  // namespace qfc

#include "qfc/modes/study.hpp"

#include "qfc/core/errors.hpp"

namespace qfc {

EfficiencyStudy optimal_efficiency_study(const GreensFunction& g_unchirped, const GreensFunction& g_chirped,
                                         const FrequencyBand& band) {
  if (g_unchirped.in_grid() != g_chirped.in_grid() || g_unchirped.out_grid() != g_chirped.out_grid())
    throw PreconditionError("optimal_efficiency_study: Green's functions are on different grids");
  const auto su = schmidt_band_limited(g_unchirped, band, 1);
  const auto sc = schmidt_band_limited(g_chirped, band, 1);
  const double max_u = su.singular_values[0] * su.singular_values[0];
  const double max_c = sc.singular_values[0] * sc.singular_values[0];
  const SpectralMode best_u = su.input_modes[0].normalized();
  const double transferred = conversion_efficiency(g_chirped, best_u, band);
  return EfficiencyStudy{max_u, max_c, transferred, max_u > 0.0 ? transferred / max_u : 0.0, best_u,
                         sc.input_modes[0].normalized()};
}

}  // namespace qfc

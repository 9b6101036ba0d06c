#pragma once

#include "qfc/modes/schmidt.hpp"

namespace qfc {

struct EfficiencyStudy {
  double max_efficiency_unchirped = 0.0;  // leading singular value squared
  double max_efficiency_chirped = 0.0;
  double transferred_efficiency = 0.0;    // unchirped-optimal mode sent through the chirped G
  double ratio = 0.0;                     // transferred / max_efficiency_unchirped
  SpectralMode optimal_unchirped;
  SpectralMode optimal_chirped;
};

// Both Green's functions must share their grids. Efficiencies are computed
// into `band` of the output grid.
EfficiencyStudy optimal_efficiency_study(const GreensFunction& g_unchirped, const GreensFunction& g_chirped,
                                         const FrequencyBand& band);

}  // namespace qfc

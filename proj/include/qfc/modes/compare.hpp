#pragma once

#include <vector>

#include "qfc/core/greens.hpp"
#include "qfc/recon/phase.hpp"

namespace qfc {

struct GaugeMetrics {
  double phase_rmse = 0.0;             // rad, after per-row offset removal
  double magnitude_correlation = 0.0;  // cosine similarity, blind to a global scale
  double slope_error = 0.0;            // ps/nm, NaN when no fit is available
  double recon_slope = 0.0;            // ps/nm
  double truth_slope = 0.0;            // ps/nm
  double efficiency_error = 0.0;       // worst relative error over the test modes
  std::size_t compared_points = 0;
};

// Compares a reconstruction with the ground truth sampled at the probe
// centers. Every metric is blind to output-only phases of either argument.
// Throws PreconditionError when the grids do not line up (resample first).
GaugeMetrics compare_gauge_invariant(const ReconstructedGreens& recon, const GreensFunction& truth);

// The ground truth in reconstruction form: |G| and arg G at the probe
// centers, masked where |G| falls below `threshold` of the row maximum.
ReconstructedGreens sample_truth(const GreensFunction& truth, const std::vector<double>& centers,
                                 double threshold = 0.02);

}  // namespace qfc

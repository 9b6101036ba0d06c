#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "qfc/core/greens.hpp"

namespace qfc {

// Bichromatic coherent probe: tones at center +- shear/2, the upper tone
// delayed by `delay_ps` relative to the lower one.
struct TwoToneProbe {
  double center = 0.0;  // rad/s
  double shear = 0.0;   // rad/s
  double delay_ps = 0.0;
  double amplitude = 1.0;
};

struct ToneIndices {
  std::size_t minus;
  std::size_t plus;
};

// Moves both tones onto the nearest grid points keeping their separation an
// integer number (>= 1) of grid cells. The returned probe carries the snapped
// center and shear.
TwoToneProbe snap_probe(const FrequencyGrid& in_grid, double center, double shear,
                        double delay_ps = 0.0, double amplitude = 1.0);

// Grid indices of both tones; throws PreconditionError if a tone is off grid
// or outside the grid.
ToneIndices tone_indices(const FrequencyGrid& in_grid, const TwoToneProbe& probe);

// Output spectrum for a discrete two-tone input:
//   I(k) = (a0^2/2) (|G+|^2 + |G-|^2 + G+ conj(G-) e^{i shear tau} + c.c.)
Eigen::VectorXd output_intensity(const GreensFunction& g, const TwoToneProbe& probe);

}  // namespace qfc

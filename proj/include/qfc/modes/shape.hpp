#pragma once

#include <cstddef>

#include "qfc/core/greens.hpp"

namespace qfc {

// Largest distance of arg G from its magnitude-weighted circular mean over
// the support |G| >= threshold * max|G|.
struct PhaseFlatness {
  double max_deviation = 0.0;  // rad
  double rms_deviation = 0.0;  // rad
  std::size_t points = 0;
};
PhaseFlatness phase_flatness(const GreensFunction& g, double threshold = 0.02);

enum class GreensAxis { kAlongInput, kAlongOutput };

// arg G along one row (kAlongInput, fixed output index) or one column,
// unwrapped over the contiguous support around the peak and fitted with
// c0 + c1 x + c2 x^2, x measured in rad/s from the grid center.
struct QuadraticPhaseFit {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;  // rad / (rad/s)^2
  double rms_residual = 0.0;
  double phase_span = 0.0;  // peak-to-peak of the fitted quadratic over the support
  std::size_t points = 0;
};
QuadraticPhaseFit quadratic_phase(const GreensFunction& g, GreensAxis axis, std::size_t index,
                                  double threshold = 0.02);

// Comparison of a mode with the Gaussian that has the same centroid and
// r.m.s. width of |f|^2.
struct GaussianShape {
  double center = 0.0;  // rad/s
  double fwhm = 0.0;    // rad/s, intensity
  double mismatch = 0.0;            // ||f| - g| / ||g||
  double max_phase_deviation = 0.0;  // rad, within the intensity FWHM, relative to the peak sample
};
GaussianShape gaussian_shape(const SpectralMode& f);

}  // namespace qfc

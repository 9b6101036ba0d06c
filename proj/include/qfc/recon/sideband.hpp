#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qfc/measure/dataset.hpp"

namespace qfc {

// Beat coefficients per probe center, normalized by the probe power a0^2/2:
// coefficients(c, k) = G(k, +) conj(G(k, -)), dc(c, k) = |G(k, +)|^2 + |G(k, -)|^2.
struct SidebandMap {
  FrequencyGrid out_grid;
  std::vector<double> centers;
  Eigen::MatrixXcd coefficients;  // [center x out]
  Eigen::MatrixXd dc;             // [center x out]
  double shear = 0.0;
  double explained_fraction = 1.0;  // share of the delay-dependent power captured at the shear
  std::vector<std::string> warnings;
};

// Rejects datasets whose delay traces carry less than this share of their
// AC power at the stated shear.
inline constexpr double kMinExplainedFraction = 0.5;

// Uniform delay grid with spacing mean_spacing / factor spanning the
// original sweep. Each (center, out) trace is replaced by its least-squares
// fit to c0 + c1 cos(shear tau) + c2 sin(shear tau); a uniform sweep with
// factor 1 is returned unchanged. Throws ConsistencyError when the sweep is
// shorter than one beat period or the fit explains too little of the signal.
DelaySweepDataset resample_uniform(const DelaySweepDataset& data, std::size_t factor);

// Exact-frequency projection at the shear over the longest whole number of
// beat periods in the sweep (trimming is recorded as a warning). Throws
// ConsistencyError when the beat explains less than `min_explained` of the
// delay-dependent power.
SidebandMap extract_sideband(const DelaySweepDataset& data, double min_explained = kMinExplainedFraction);

// Zero-padded delay-domain spectrum of one probe center for inspection:
//   F(w) = sum_n I(tau_n) exp(-i w tau_n) d_tau
struct DelaySpectrum {
  std::vector<double> frequencies;  // rad/s, ascending
  Eigen::MatrixXcd values;          // [out x frequency]
};
DelaySpectrum delay_spectrum(const DelaySweepDataset& data, std::size_t center, std::size_t pad_factor = 8);

}  // namespace qfc

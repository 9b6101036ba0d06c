#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "qfc/recon/sideband.hpp"

namespace qfc {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

enum class MaskAxis { kOut, kIn };

// Wavelength interval (nm) excluded from the analysis, e.g. pump leakage.
struct MaskInterval {
  double lo_nm = 0.0;
  double hi_nm = 0.0;
  MaskAxis axis = MaskAxis::kOut;
};

struct PhaseOptions {
  double threshold = 0.02;     // relative to the per-row maximum |coefficient|
  double global_floor = 1e-3;  // relative to the maximum over the whole map
  std::vector<MaskInterval> mask_intervals;
};

// Phase of the beat coefficient, unwrapped along the center axis inside each
// contiguous run of valid samples.
struct PhaseDifferenceMap {
  FrequencyGrid out_grid;
  std::vector<double> centers;
  Eigen::MatrixXd delta_phi;  // [out x center], rad; NaN where masked out
  Eigen::MatrixXd weight;     // [out x center], |coefficient|; 0 where masked out
  BoolMatrix mask;            // [out x center]
  std::vector<bool> row_valid;
  std::vector<bool> row_segmented;  // more than one run; runs are not stitched
  double shear = 0.0;
  PhaseOptions options;
  std::vector<std::string> warnings;
};

PhaseDifferenceMap phase_differences(const SidebandMap& sb, const PhaseOptions& options = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

// Unweighted least squares y = intercept + slope * x.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct GroupDelayMap {
  Eigen::MatrixXd tau_ps;              // [out x center], NaN where masked out
  std::vector<double> center_wavelength_nm;
  std::vector<double> center_tau_ps;   // band-averaged, NaN when no valid sample
  std::vector<double> center_spread_ps;  // r.m.s. spread across the band
  std::vector<bool> center_valid;
  LinearFit fit;                       // center_tau_ps against wavelength, ps/nm
};

// tau_g = delta_phi / shear. The band average per center is the argument of
// the weighted phasor sum, and the per-center series is unwrapped modulo one
// beat period before the linear fit.
GroupDelayMap group_delay_map(const PhaseDifferenceMap& pd);

enum class MagnitudeMode { kDcHalf, kQuadraticSplit };

struct ReconstructedGreens {
  FrequencyGrid out_grid;
  std::vector<double> centers;
  Eigen::MatrixXd magnitude{};    // [out x center], arbitrary scale
  Eigen::MatrixXd phase{};        // [out x center], rad, zero mean per row over the mask
  Eigen::MatrixXd group_delay{};  // [out x center], ps
  BoolMatrix mask{};
  double shear = 0.0;
  std::vector<MaskInterval> mask_intervals{};
  std::optional<LinearFit> delay_fit{};
  std::vector<std::string> warnings{};
};

// Magnitude, group delay and mask only; the phase is left as NaN. Used when
// the probe centers are too sparse to integrate.
ReconstructedGreens reconstruct_without_phase(const PhaseDifferenceMap& pd, const SidebandMap& sb,
                                              MagnitudeMode mode = MagnitudeMode::kDcHalf);

// Cumulative trapezoid of delta_phi / shear over the probe centers in every
// run, with the per-row mean removed. Requires uniformly spaced centers no
// further apart than the shear.
ReconstructedGreens integrate_phase(const PhaseDifferenceMap& pd, const SidebandMap& sb,
                                    MagnitudeMode mode = MagnitudeMode::kDcHalf);

}  // namespace qfc

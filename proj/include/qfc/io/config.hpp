#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "qfc/measure/dataset.hpp"
#include "qfc/recon/phase.hpp"
#include "qfc/sim/converter.hpp"

namespace qfc::io {

inline constexpr const char* kConfigSchema = "qfc-sim/1";

struct GridConfig {
  double center_nm = 0.0;
  double spacing_hz = 0.0;  // ordinary frequency
  std::size_t count = 0;
  FrequencyGrid to_grid(const std::string& label) const;
};

struct SimulationConfig {
  SimModel model = SimModel::kClosedForm;
  double dz_m = 0.0;            // split-step only; 0 picks length / 200
  double product_gdd_ps2 = 0.0;  // quadratic spectral phase imposed on the pump product
};

struct ProbeConfig {
  double center_start_nm = 1551.0;
  double center_stop_nm = 1562.0;
  std::size_t center_count = 23;
  double shear_hz = 560e6;
  double delay_start_ps = 0.0;
  double delay_stop_ps = 4000.0;
  double delay_step_ps = 500.0;
  double amplitude = 1.0;
};

struct DetectorConfig {
  double osa_fwhm_nm = 0.05;
  std::size_t averages = 3;
};

// "none", "experiment-like" or "custom" (explicit sigmas).
struct NoiseConfig {
  std::string profile = "none";
  double additive_sigma = 0.0;
  double multiplicative_sigma = 0.0;
};

// Sigmas of the "experiment-like" profile.
inline constexpr double kExperimentAdditiveSigma = 0.085;
inline constexpr double kExperimentMultiplicativeSigma = 0.02;

struct ReconConfig {
  PhaseOptions phase;
  std::size_t resample_factor = 1;
  MagnitudeMode magnitude = MagnitudeMode::kDcHalf;
};

// Pass/fail bounds checked by the pipeline summary; absent bounds are not checked.
struct Tolerances {
  std::optional<double> slope_expected_ps_per_nm;
  double slope_tolerance_ps_per_nm = 0.0;
  std::optional<double> phase_rmse_max_rad;
  std::optional<double> sigma_tau_expected_ps;
  double sigma_tau_factor = 2.0;
};

struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 1;
  GridConfig in_grid;
  GridConfig out_grid;
  ConverterChain chain;
  SimulationConfig simulation;
  ProbeConfig probe;
  DetectorConfig detector;
  NoiseConfig noise;
  ReconConfig recon;
  Tolerances tolerances;

  NoiseSpec noise_spec() const;
};

// Strict parse: unknown fields and invalid values raise ConfigError with the
// JSON pointer of the offending entry.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& c);

}  // namespace qfc::io

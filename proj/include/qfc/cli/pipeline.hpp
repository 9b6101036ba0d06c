#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qfc/io/config.hpp"
#include "qfc/measure/dataset.hpp"
#include "qfc/modes/compare.hpp"
#include "qfc/recon/phase.hpp"

namespace qfc::cli {

struct RunOptions {
  std::size_t threads = 0;  // 0 = hardware concurrency
  bool verbose = false;
};

// Chain as simulated: the optional pump-product dispersion is folded into
// pump_p.
ConverterChain effective_chain(const io::ExperimentConfig& cfg);

struct Simulation {
  GreensFunction greens;                 // converted block, input band to output band
  std::optional<GreensFunction> through;  // unconverted input-band transfer
  nlohmann::json metadata;
};
Simulation simulate(const io::ExperimentConfig& cfg, const RunOptions& opts = {});

// Probe centers evenly spaced in wavelength, snapped to the input grid, in
// increasing angular frequency.
std::vector<double> probe_centers(const io::ExperimentConfig& cfg, const FrequencyGrid& in_grid);
std::vector<double> probe_delays(const io::ExperimentConfig& cfg);
SweepRequest sweep_request(const io::ExperimentConfig& cfg, const FrequencyGrid& in_grid, const RunOptions& opts = {});
DelaySweepDataset synthesize(const io::ExperimentConfig& cfg, const GreensFunction& g, const RunOptions& opts = {});

struct Reconstruction {
  SidebandMap sideband;
  PhaseDifferenceMap differences;
  GroupDelayMap delays;
  ReconstructedGreens greens;
  bool phase_integrated = false;
};
// Resample (when factor > 1), extract the sideband, form phase differences,
// and integrate when the centers allow it; otherwise the phase is left empty
// with a warning.
Reconstruction reconstruct(const DelaySweepDataset& data, const io::ReconConfig& cfg);

struct Check {
  std::string name;
  double value = 0.0;
  std::string bound;
  bool pass = false;
};

struct PipelineSummary {
  double slope_ps_per_nm = 0.0;
  double slope_stderr = 0.0;
  double sigma_tau_ps = 0.0;  // r.m.s. residual of the band-averaged delays about the fit
  std::size_t fit_points = 0;
  std::optional<GaugeMetrics> comparison;
  std::vector<Check> checks;
  std::vector<std::string> warnings;

  bool all_pass() const;
  nlohmann::json to_json() const;
  std::string table() const;
};

// Evaluates the configured tolerances against a finished reconstruction.
PipelineSummary summarize(const io::ExperimentConfig& cfg, const Reconstruction& r,
                          const std::optional<GaugeMetrics>& comparison);

// simulate -> synth -> reconstruct -> compare, writing every artifact under `out`.
PipelineSummary run_pipeline(const io::ExperimentConfig& cfg, const std::filesystem::path& out,
                             const RunOptions& opts = {});

// Schmidt analysis of a Green's function; with `reference` also the
// efficiency study treating `g` as the chirped case. Writes report.json,
// modes.csv, time_modes.csv and fig1a.csv into `out`.
nlohmann::json analyze_greens(const GreensFunction& g, const GreensFunction* reference,
                              const std::filesystem::path& out);
nlohmann::json analyze_recon(const ReconstructedGreens& r, const std::filesystem::path& out);

// Plot-ready long-format CSVs.
void write_fig1a(const std::filesystem::path& path, const GreensFunction& g, std::size_t max_points_per_axis = 256);
void write_fig3b(const std::filesystem::path& path, const DelaySweepDataset& data);
void write_fig4a(const std::filesystem::path& path, const GroupDelayMap& gd);
void write_fig5(const std::filesystem::path& magnitude_path, const std::filesystem::path& phase_path,
                const ReconstructedGreens& r);

}  // namespace qfc::cli

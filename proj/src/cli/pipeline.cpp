#include "qfc/cli/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "qfc/core/errors.hpp"
#include "qfc/core/units.hpp"
#include "qfc/io/csv.hpp"
#include "qfc/io/greens_io.hpp"
#include "qfc/io/recon_io.hpp"
#include "qfc/io/report_io.hpp"
#include "qfc/io/sweep_io.hpp"
#include "qfc/measure/probe.hpp"
#include "qfc/modes/schmidt.hpp"
#include "qfc/modes/shape.hpp"
#include "qfc/modes/study.hpp"

namespace qfc::cli {

using nlohmann::json;

ConverterChain effective_chain(const io::ExperimentConfig& cfg) {
  ConverterChain chain = cfg.chain;
  if (cfg.simulation.product_gdd_ps2 != 0.0)
    chain.active.pump_p = disperse_product(chain.active.pump_p, chain.active.pump_q, cfg.simulation.product_gdd_ps2);
  return chain;
}

Simulation simulate(const io::ExperimentConfig& cfg, const RunOptions& opts) {
  const auto in = cfg.in_grid.to_grid("in");
  const auto out = cfg.out_grid.to_grid("out");
  const ConverterChain chain = effective_chain(cfg);
  const bool split = cfg.simulation.model == SimModel::kSplitStep;
  const double dz = cfg.simulation.dz_m > 0.0 ? cfg.simulation.dz_m : chain.active.active_length_m / 200.0;
  SimOptions so;
  so.threads = opts.threads;
  auto result = chain_greens(chain, in, out, cfg.simulation.model, split ? dz : 0.0, so);
  json meta{{"config", cfg.name}, {"model", io::config_to_json(cfg)["simulation"]["model"]}};
  if (split) {
    meta["dz_m"] = dz;
    meta["unitarity_defect"] = result.unitarity_defect();
  }
  return {std::move(result.converted), std::move(result.through), meta};
}

std::vector<double> probe_delays(const io::ExperimentConfig& cfg) {
  const auto& p = cfg.probe;
  const auto n = static_cast<std::size_t>(std::floor((p.delay_stop_ps - p.delay_start_ps) / p.delay_step_ps + 1e-9)) + 1;
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = p.delay_start_ps + static_cast<double>(i) * p.delay_step_ps;
  return d;
}

std::vector<double> probe_centers(const io::ExperimentConfig& cfg, const FrequencyGrid& in_grid) {
  const auto& p = cfg.probe;
  const double shear = units::hz_to_omega(p.shear_hz);
  std::vector<double> centers;
  for (std::size_t i = 0; i < p.center_count; ++i) {
    const double t = p.center_count > 1 ? static_cast<double>(i) / static_cast<double>(p.center_count - 1) : 0.0;
    const double nm = p.center_start_nm + t * (p.center_stop_nm - p.center_start_nm);
    centers.push_back(snap_probe(in_grid, units::wavelength_nm_to_omega(nm), shear).center);
  }
  std::sort(centers.begin(), centers.end());
  for (std::size_t i = 1; i < centers.size(); ++i)
    if (centers[i] == centers[i - 1])
      throw ConfigError("/probe/center_count", "probe centers collide after snapping to the input grid");
  return centers;
}

SweepRequest sweep_request(const io::ExperimentConfig& cfg, const FrequencyGrid& in_grid, const RunOptions& opts) {
  SweepRequest r;
  r.centers = probe_centers(cfg, in_grid);
  r.delays_ps = probe_delays(cfg);
  r.shear = snap_probe(in_grid, r.centers.front(), units::hz_to_omega(cfg.probe.shear_hz)).shear;
  r.amplitude = cfg.probe.amplitude;
  r.noise = cfg.noise_spec();
  r.osa_fwhm_nm = cfg.detector.osa_fwhm_nm;
  r.averages = cfg.detector.averages;
  r.threads = opts.threads;
  return r;
}

DelaySweepDataset synthesize(const io::ExperimentConfig& cfg, const GreensFunction& g, const RunOptions& opts) {
  return synthesize_sweep(g, sweep_request(cfg, g.in_grid(), opts));
}

Reconstruction reconstruct(const DelaySweepDataset& data, const io::ReconConfig& cfg) {
  SidebandMap sb = cfg.resample_factor > 1 ? extract_sideband(resample_uniform(data, cfg.resample_factor))
                                           : extract_sideband(data);
  PhaseDifferenceMap pd = phase_differences(sb, cfg.phase);
  GroupDelayMap gd = group_delay_map(pd);
  bool integrated = true;
  ReconstructedGreens rg = [&] {
    try {
      return integrate_phase(pd, sb, cfg.magnitude);
    } catch (const PreconditionError& e) {
      integrated = false;
      auto r = reconstruct_without_phase(pd, sb, cfg.magnitude);
      r.warnings.push_back(std::string("phase not integrated: ") + e.what());
      return r;
    }
  }();
  return {std::move(sb), std::move(pd), std::move(gd), std::move(rg), integrated};
}

bool PipelineSummary::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

json PipelineSummary::to_json() const {
  json j{{"slope_ps_per_nm", slope_ps_per_nm},
         {"slope_stderr_ps_per_nm", slope_stderr},
         {"sigma_tau_ps", sigma_tau_ps},
         {"fit_points", fit_points},
         {"warnings", warnings},
         {"pass", all_pass()}};
  if (comparison) {
    j["comparison"] = {{"phase_rmse_rad", comparison->phase_rmse},
                       {"magnitude_correlation", comparison->magnitude_correlation},
                       {"recon_slope_ps_per_nm", comparison->recon_slope},
                       {"truth_slope_ps_per_nm", comparison->truth_slope},
                       {"slope_error_ps_per_nm", comparison->slope_error},
                       {"efficiency_error", comparison->efficiency_error},
                       {"compared_points", comparison->compared_points}};
  }
  json checks_json = json::array();
  for (const auto& c : checks)
    checks_json.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass}});
  j["checks"] = checks_json;
  return j;
}

std::string PipelineSummary::table() const {
  std::string s;
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %14.6g\n", "group-delay slope [ps/nm]", slope_ps_per_nm);
  s += line;
  std::snprintf(line, sizeof line, "%-28s %14.6g\n", "slope std. error [ps/nm]", slope_stderr);
  s += line;
  std::snprintf(line, sizeof line, "%-28s %14.6g\n", "residual sigma_tau [ps]", sigma_tau_ps);
  s += line;
  if (comparison) {
    std::snprintf(line, sizeof line, "%-28s %14.6g\n", "phase RMSE vs truth [rad]", comparison->phase_rmse);
    s += line;
  }
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-4s %-23s %14.6g  %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                  c.bound.c_str());
    s += line;
  }
  return s;
}

PipelineSummary summarize(const io::ExperimentConfig& cfg, const Reconstruction& r,
                          const std::optional<GaugeMetrics>& comparison) {
  PipelineSummary s;
  s.slope_ps_per_nm = r.delays.fit.slope;
  s.slope_stderr = r.delays.fit.slope_stderr;
  s.sigma_tau_ps = r.delays.fit.rms_residual;
  s.fit_points = r.delays.fit.points;
  s.comparison = comparison;
  s.warnings = r.greens.warnings;
  char buf[128];
  const auto& t = cfg.tolerances;
  if (t.slope_expected_ps_per_nm) {
    std::snprintf(buf, sizeof buf, "%.6g +- %.6g", *t.slope_expected_ps_per_nm, t.slope_tolerance_ps_per_nm);
    const bool ok = r.delays.fit.points >= 2 &&
                    std::abs(s.slope_ps_per_nm - *t.slope_expected_ps_per_nm) <= t.slope_tolerance_ps_per_nm;
    s.checks.push_back({"slope_ps_per_nm", s.slope_ps_per_nm, buf, ok});
  }
  if (t.sigma_tau_expected_ps) {
    const double lo = *t.sigma_tau_expected_ps / t.sigma_tau_factor, hi = *t.sigma_tau_expected_ps * t.sigma_tau_factor;
    std::snprintf(buf, sizeof buf, "[%.6g, %.6g]", lo, hi);
    s.checks.push_back({"sigma_tau_ps", s.sigma_tau_ps, buf, s.sigma_tau_ps >= lo && s.sigma_tau_ps <= hi});
  }
  if (t.phase_rmse_max_rad) {
    std::snprintf(buf, sizeof buf, "< %.6g", *t.phase_rmse_max_rad);
    const double v = comparison ? comparison->phase_rmse : std::numeric_limits<double>::quiet_NaN();
    s.checks.push_back({"phase_rmse_rad", v, buf, comparison.has_value() && v < *t.phase_rmse_max_rad});
  }
  return s;
}

PipelineSummary run_pipeline(const io::ExperimentConfig& cfg, const std::filesystem::path& out,
                             const RunOptions& opts) {
  std::filesystem::create_directories(out);
  io::write_file(out / "config.json", io::config_to_json(cfg).dump(2) + "\n");
  const Simulation sim = simulate(cfg, opts);
  io::write_greens(out / "greens.qfcg", sim.greens, sim.metadata);

  const DelaySweepDataset data = synthesize(cfg, sim.greens, opts);
  io::write_sweep(out / "sweep", data);
  write_fig3b(out / "fig3b.csv", data);

  const Reconstruction rec = reconstruct(data, cfg.recon);
  io::write_recon(out / "recon", rec.greens);
  write_fig4a(out / "fig4a.csv", rec.delays);
  write_fig5(out / "fig5a.csv", out / "fig5b.csv", rec.greens);

  std::optional<GaugeMetrics> metrics;
  if (rec.phase_integrated) metrics = compare_gauge_invariant(rec.greens, sim.greens);
  PipelineSummary summary = summarize(cfg, rec, metrics);
  if (metrics) io::write_report(out / "metrics.json", "compare", summary.to_json()["comparison"]);
  io::write_report(out / "summary.json", "pipeline", summary.to_json());
  return summary;
}

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

json shape_json(const GaussianShape& s) {
  return {{"center_wavelength_nm", units::omega_to_wavelength_nm(s.center)},
          {"fwhm_rad_per_s", s.fwhm},
          {"gaussian_mismatch", s.mismatch},
          {"max_phase_deviation_in_fwhm_rad", s.max_phase_deviation}};
}

json quad_json(const QuadraticPhaseFit& q) {
  return {{"c2_rad_s2", q.c2},
          {"c2_ps2", q.c2 * 1e24},
          {"rms_residual_rad", q.rms_residual},
          {"phase_span_rad", q.phase_span},
          {"points", q.points}};
}

}  // namespace

json analyze_greens(const GreensFunction& g, const GreensFunction* reference, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  const auto s = schmidt(g);
  const std::size_t shown = std::min<std::size_t>(10, static_cast<std::size_t>(s.singular_values.size()));
  std::vector<double> sv(s.singular_values.data(), s.singular_values.data() + shown);

  Eigen::Index pk = 0, pj = 0;
  g.values().cwiseAbs().maxCoeff(&pk, &pj);
  const auto flat = phase_flatness(g);
  const std::size_t samples = next_pow2(4 * g.in_grid().count());
  const auto t_lead = time_domain_mode(s.input_modes[0], samples);

  json m{{"singular_values", sv},
         {"schmidt_number", s.schmidt_number},
         {"max_efficiency", s.singular_values[0] * s.singular_values[0]},
         {"phase_flatness", {{"max_deviation_rad", flat.max_deviation}, {"rms_deviation_rad", flat.rms_deviation}, {"points", flat.points}}},
         {"phase_along_input", quad_json(quadratic_phase(g, GreensAxis::kAlongInput, static_cast<std::size_t>(pk)))},
         {"phase_along_output", quad_json(quadratic_phase(g, GreensAxis::kAlongOutput, static_cast<std::size_t>(pj)))},
         {"leading_input_mode", shape_json(gaussian_shape(s.input_modes[0]))},
         {"leading_output_mode", shape_json(gaussian_shape(s.output_modes[0]))},
         {"leading_input_duration_ps", intensity_fwhm(t_lead) * 1e12}};

  std::vector<std::string> names{"leading"};
  std::vector<TimeSeries> series{t_lead};
  if (reference) {
    const auto study = optimal_efficiency_study(*reference, g, full_band(g.out_grid()));
    const auto t_ref = time_domain_mode(study.optimal_unchirped, samples);
    const double ratio_mag = reference->values().cwiseAbs().maxCoeff() > 0.0
                                 ? (g.values().cwiseAbs() - reference->values().cwiseAbs()).cwiseAbs().maxCoeff() /
                                       reference->values().cwiseAbs().maxCoeff()
                                 : 0.0;
    m["study"] = {{"max_efficiency_reference", study.max_efficiency_unchirped},
                  {"max_efficiency", study.max_efficiency_chirped},
                  {"transferred_efficiency", study.transferred_efficiency},
                  {"ratio", study.ratio},
                  {"max_magnitude_difference", ratio_mag},
                  {"reference_leading_duration_ps", intensity_fwhm(t_ref) * 1e12},
                  {"duration_ratio", intensity_fwhm(t_lead) / intensity_fwhm(t_ref)}};
    names.push_back("reference_leading");
    series.push_back(t_ref);
  }
  io::write_report(out / "report.json", "greens", m);
  io::write_modes_csv(out / "modes.csv", s, 3);
  io::write_time_modes_csv(out / "time_modes.csv", names, series);
  write_fig1a(out / "fig1a.csv", g);
  return m;
}

json analyze_recon(const ReconstructedGreens& r, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  std::size_t masked = 0, finite_phase = 0;
  double max_abs_phase = 0.0;
  for (Eigen::Index i = 0; i < r.mask.size(); ++i) {
    if (!r.mask.data()[i]) continue;
    ++masked;
    if (std::isfinite(r.phase.data()[i])) {
      ++finite_phase;
      max_abs_phase = std::max(max_abs_phase, std::abs(r.phase.data()[i]));
    }
  }
  json m{{"centers", r.centers.size()},
         {"out_samples", r.out_grid.count()},
         {"masked_in", masked},
         {"phase_samples", finite_phase},
         {"max_abs_phase_rad", max_abs_phase},
         {"shear_hz", units::omega_to_hz(r.shear)},
         {"warnings", r.warnings}};
  if (r.delay_fit) {
    m["delay_fit"] = {{"slope_ps_per_nm", r.delay_fit->slope},
                      {"intercept_ps", r.delay_fit->intercept},
                      {"rms_residual_ps", r.delay_fit->rms_residual},
                      {"slope_stderr_ps_per_nm", r.delay_fit->slope_stderr},
                      {"points", r.delay_fit->points}};
  }
  io::write_report(out / "report.json", "recon", m);
  write_fig5(out / "fig5a.csv", out / "fig5b.csv", r);
  return m;
}

void write_fig1a(const std::filesystem::path& path, const GreensFunction& g, std::size_t max_points_per_axis) {
  const std::size_t nk = g.out_grid().count(), nj = g.in_grid().count();
  const std::size_t sk = std::max<std::size_t>(1, (nk + max_points_per_axis - 1) / max_points_per_axis);
  const std::size_t sj = std::max<std::size_t>(1, (nj + max_points_per_axis - 1) / max_points_per_axis);
  std::string out = "lambda_in_nm,lambda_out_nm,abs,phase\n";
  for (std::size_t j = 0; j < nj; j += sj)
    for (std::size_t k = 0; k < nk; k += sk) {
      const cplx v = g.values()(k, j);
      const std::array<double, 4> row{g.in_grid().wavelength_nm(j), g.out_grid().wavelength_nm(k), std::abs(v),
                                      std::arg(v)};
      io::append_csv_row(out, row);
    }
  io::write_file(path, out);
}

void write_fig3b(const std::filesystem::path& path, const DelaySweepDataset& data) {
  std::string out = "center_nm,delay_ps,lambda_out_nm,intensity\n";
  for (std::size_t c = 0; c < data.center_count(); ++c)
    for (std::size_t d = 0; d < data.delay_count(); ++d)
      for (std::size_t k = 0; k < data.out_count(); ++k) {
        const std::array<double, 4> row{units::omega_to_wavelength_nm(data.centers()[c]), data.delays_ps()[d],
                                        data.out_grid().wavelength_nm(k), data.at(c, k, d)};
        io::append_csv_row(out, row);
      }
  io::write_file(path, out);
}

void write_fig4a(const std::filesystem::path& path, const GroupDelayMap& gd) {
  std::string out = "lambda_nm,tau_ps,spread_ps,fit_ps,valid\n";
  for (std::size_t c = 0; c < gd.center_wavelength_nm.size(); ++c) {
    const double x = gd.center_wavelength_nm[c];
    const std::array<double, 5> row{x, gd.center_tau_ps[c], gd.center_spread_ps[c],
                                    gd.fit.intercept + gd.fit.slope * x, gd.center_valid[c] ? 1.0 : 0.0};
    io::append_csv_row(out, row);
  }
  io::write_file(path, out);
}

void write_fig5(const std::filesystem::path& magnitude_path, const std::filesystem::path& phase_path,
                const ReconstructedGreens& r) {
  std::string mag = "lambda_in_nm,lambda_out_nm,value\n", ph = mag;
  for (std::size_t c = 0; c < r.centers.size(); ++c) {
    const double lin = units::omega_to_wavelength_nm(r.centers[c]);
    for (std::size_t k = 0; k < r.out_grid.count(); ++k) {
      if (!r.mask(k, c)) continue;
      const double lout = r.out_grid.wavelength_nm(k);
      io::append_csv_row(mag, std::array<double, 3>{lin, lout, r.magnitude(k, c)});
      if (std::isfinite(r.phase(k, c))) io::append_csv_row(ph, std::array<double, 3>{lin, lout, r.phase(k, c)});
    }
  }
  io::write_file(magnitude_path, mag);
  io::write_file(phase_path, ph);
}

}  // namespace qfc::cli

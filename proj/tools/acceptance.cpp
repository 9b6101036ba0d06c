// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes. Run from ctest or by hand with --configs DIR.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qfc/cli/pipeline.hpp"
#include "qfc/core/units.hpp"
#include "qfc/io/config.hpp"
#include "qfc/io/greens_io.hpp"
#include "qfc/io/recon_io.hpp"
#include "qfc/io/sweep_io.hpp"
#include "qfc/measure/probe.hpp"
#include "qfc/modes/compare.hpp"
#include "qfc/modes/schmidt.hpp"
#include "qfc/sim/converter.hpp"

namespace fs = std::filesystem;
using namespace qfc;

namespace {

// Criterion 1: dispersion-slope recovery.
constexpr double kSlopeTruth = 34.2;           // ps/nm, 1.9 km at D = 18 ps/(nm km)
constexpr double kSlopeRelTol = 0.01;
constexpr double kRuntimeLimitS = 60.0;

// Criterion 2: noise realism, evaluated over a fixed seed ensemble.
constexpr int kEnsembleSize = 100;
constexpr std::uint64_t kEnsembleSeed0 = 1000;
constexpr double kSigmaTauTarget = 34.2;       // ps r.m.s.
constexpr double kSigmaTauFactor = 2.0;
constexpr double kNoisySlopeTol = 1.5;         // ps/nm

// Criterion 3: harmonics of the 80 MHz repetition rate.
constexpr double kHarmonicsHz[] = {480e6, 560e6, 640e6, 720e6};
constexpr double kConsistencyK = 2.0;          // multiples of the combined standard error
constexpr std::uint64_t kHarmonicSeed = 424242;  // first seed: slope consistency
constexpr int kHarmonicSeeds = 100;               // shared by every shear: precision trend

// Criterion 4: phase fidelity.
constexpr double kPhaseRmseMax = 0.05;         // rad
constexpr double kSidebandRelTol = 1e-9;
constexpr double kDenseBandNm[] = {1556.0, 1557.0};

// Criterion 5: chirped-pump mode study, bounds and frozen regression values.
constexpr double kFlatPhaseMax = 0.05;         // rad
constexpr double kGaussianMismatchMax = 0.01;
constexpr double kMagnitudeChangeMax = 0.01;   // relative to max |G|
constexpr double kQuadraticResidualMax = 0.05; // rad
constexpr double kChirpRatioMax = 0.5;
constexpr double kDurationRatioMin = 1.5;
constexpr double kExpectedC2Ps2 = 1000.0;      // half the product GDD of 2000 ps^2
constexpr double kC2RelTol = 0.01;
constexpr double kFrozenRatio = 0.408818;
constexpr double kFrozenSchmidtUnchirped = 1.02207;
constexpr double kFrozenSchmidtChirped = 2.97977;
constexpr double kFrozenDurationRatio = 2.14475;
constexpr double kFrozenRelTol = 1e-4;

// Criterion 6: property suites.
constexpr double kUnitarityMax = 1e-6;
constexpr double kStrongCoupling = 0.3;        // about 30% peak conversion
constexpr std::size_t kStrongGridCount = 512;  // wide enough to hold the pump-broadened through light
constexpr double kBornRelL2Max = 0.01;
constexpr double kGaugeTol = 1e-12;
constexpr double kShearScalingTarget = 4.0;
constexpr double kShearScalingTol = 0.2;
constexpr double kParsevalTol = 1e-9;

std::string format(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back((ok ? "" : "FAILED ") + what);
  }
};

double relative_l2(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a - b).norm() / b.norm(); }

bool bit_equal(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(cplx) * static_cast<std::size_t>(a.size())) == 0;
}

bool bit_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double x = a.data()[i], y = b.data()[i];
    if (!(std::isnan(x) && std::isnan(y)) && std::memcmp(&x, &y, sizeof x) != 0) return false;
  }
  return true;
}

class Suite {
 public:
  Suite(fs::path configs, fs::path scratch) : configs_(std::move(configs)), scratch_(std::move(scratch)) {}

  io::ExperimentConfig config(const std::string& name) const { return io::load_config(configs_ / name); }

  Outcome slope_recovery() {
    Outcome o;
    const auto cfg = config("validation.json");
    const auto t0 = std::chrono::steady_clock::now();
    const auto summary = cli::run_pipeline(cfg, scratch_ / "c1");
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(std::abs(summary.slope_ps_per_nm - kSlopeTruth) <= kSlopeRelTol * kSlopeTruth,
              format("slope %.4f ps/nm (target %.1f +/- %.0f%%)", summary.slope_ps_per_nm, kSlopeTruth, 100 * kSlopeRelTol));
    o.require(seconds < kRuntimeLimitS, format("runtime %.2f s (< %.0f s)", seconds, kRuntimeLimitS));
    return o;
  }

  Outcome noise_realism() {
    Outcome o;
    auto cfg = config("validation_noisy.json");
    o.require(cfg.noise.profile == "experiment-like", "bundled noisy config uses the experiment-like profile");
    const auto sim = cli::simulate(cfg);
    std::vector<double> slopes, sigmas;
    for (int i = 0; i < kEnsembleSize; ++i) {
      cfg.seed = kEnsembleSeed0 + static_cast<std::uint64_t>(i);
      const auto rec = cli::reconstruct(cli::synthesize(cfg, sim.greens), cfg.recon);
      slopes.push_back(rec.delays.fit.slope);
      sigmas.push_back(rec.delays.fit.rms_residual);
      if (i == 0) {
        io::write_sweep(scratch_ / "c2_sweep", cli::synthesize(cfg, sim.greens));
        sweep_roundtrip_ = io::ingest_sweep(scratch_ / "c2_sweep").intensities() ==
                           cli::synthesize(cfg, sim.greens).intensities();
      }
    }
    const double n = kEnsembleSize;
    const double mean = std::accumulate(slopes.begin(), slopes.end(), 0.0) / n;
    double var = 0.0;
    for (double s : slopes) var += (s - mean) * (s - mean);
    const double sd = std::sqrt(var / (n - 1)), sem = sd / std::sqrt(n);
    std::vector<double> sorted = sigmas;
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[kEnsembleSize / 2 - 1] + sorted[kEnsembleSize / 2]);
    const auto within = std::count_if(slopes.begin(), slopes.end(), [](double s) { return std::abs(s - kSlopeTruth) <= kNoisySlopeTol; });

    o.require(median >= kSigmaTauTarget / kSigmaTauFactor && median <= kSigmaTauTarget * kSigmaTauFactor,
              format("median sigma_tau %.2f ps over %d seeds (within x%.0f of %.1f)", median, kEnsembleSize, kSigmaTauFactor,
                     kSigmaTauTarget));
    o.require(std::abs(mean - kSlopeTruth) + 2 * sem <= kNoisySlopeTol,
              format("ensemble slope %.3f +/- %.3f ps/nm (|bias| + 2 sem within %.1f)", mean, sem, kNoisySlopeTol));
    o.notes.push_back(format("per-run slope sd %.2f ps/nm, %ld/%d runs within +/- %.1f", sd, static_cast<long>(within),
                             kEnsembleSize, kNoisySlopeTol));

    // The bundled fixed-seed run, for reference.
    const auto fixed = config("validation_noisy.json");
    const auto rec = cli::reconstruct(cli::synthesize(fixed, sim.greens), fixed.recon);
    o.notes.push_back(format("bundled seed: slope %.2f ps/nm, sigma_tau %.2f ps", rec.delays.fit.slope,
                             rec.delays.fit.rms_residual));
    return o;
  }

  Outcome harmonics() {
    Outcome o;
    auto base = config("validation_noisy.json");
    const double span = base.in_grid.spacing_hz * static_cast<double>(base.in_grid.count - 1);
    std::vector<double> slope, err, mean_sigma;
    std::string line;
    for (double h : kHarmonicsHz) {
      auto cfg = base;
      cfg.probe.shear_hz = h;
      cfg.in_grid.spacing_hz = h / 2;
      cfg.in_grid.count = 2 * static_cast<std::size_t>(std::ceil(0.5 * span / cfg.in_grid.spacing_hz)) + 1;
      const auto sim = cli::simulate(cfg);
      double sum = 0.0;
      for (int i = 0; i < kHarmonicSeeds; ++i) {
        cfg.seed = kHarmonicSeed + static_cast<std::uint64_t>(i);
        const auto fit = cli::reconstruct(cli::synthesize(cfg, sim.greens), cfg.recon).delays.fit;
        if (i == 0) {
          slope.push_back(fit.slope);
          err.push_back(fit.slope_stderr);
        }
        sum += fit.rms_residual;
      }
      mean_sigma.push_back(sum / kHarmonicSeeds);
      line += format("%s%.0f MHz: %.2f +/- %.2f ps/nm, mean sigma_tau %.1f ps", line.empty() ? "" : "; ", h / 1e6,
                     slope.back(), err.back(), mean_sigma.back());
    }
    o.notes.push_back(line);
    double worst = 0.0;
    for (std::size_t i = 0; i < slope.size(); ++i)
      for (std::size_t j = i + 1; j < slope.size(); ++j)
        worst = std::max(worst, std::abs(slope[i] - slope[j]) / std::hypot(err[i], err[j]));
    o.require(worst <= kConsistencyK, format("largest pairwise slope gap %.2f combined errors (<= %.0f)", worst, kConsistencyK));
    bool monotone = true;
    for (std::size_t i = 1; i < mean_sigma.size(); ++i) monotone = monotone && mean_sigma[i] < mean_sigma[i - 1];
    o.require(monotone, format("mean sigma_tau over %d shared seeds falls with every step up in shear", kHarmonicSeeds));
    return o;
  }

  Outcome phase_fidelity() {
    Outcome o;
    auto cfg = config("validation.json");
    const auto in = cfg.in_grid.to_grid("in");
    const auto sim = cli::simulate(cfg);
    auto req = cli::sweep_request(cfg, in);
    req.centers.clear();
    const double hi = units::wavelength_nm_to_omega(kDenseBandNm[0]), lo = units::wavelength_nm_to_omega(kDenseBandNm[1]);
    for (std::size_t j = 0; j < in.count(); ++j)
      if (in.omega(j) >= lo && in.omega(j) <= hi) req.centers.push_back(in.omega(j));
    req.noise = {};
    req.osa_fwhm_nm = 0.0;
    req.averages = 1;
    const auto data = synthesize_sweep(sim.greens, req);
    const auto rec = cli::reconstruct(data, cfg.recon);
    o.require(rec.phase_integrated, format("%zu centres one grid cell apart, phase integrated", req.centers.size()));
    const auto m = compare_gauge_invariant(rec.greens, sim.greens);
    o.require(m.phase_rmse < kPhaseRmseMax,
              format("gauge-removed phase rmse %.2e rad over %zu samples (< %.2f)", m.phase_rmse, m.compared_points, kPhaseRmseMax));

    double worst = 0.0, scale = 0.0;
    const auto& g = sim.greens.values();
    for (std::size_t c = 0; c < req.centers.size(); ++c) {
      const auto t = tone_indices(in, TwoToneProbe{req.centers[c], data.metadata().shear});
      for (std::size_t k = 0; k < sim.greens.out_grid().count(); ++k) {
        const cplx direct = req.amplitude * req.amplitude * g(k, t.plus) * std::conj(g(k, t.minus));
        worst = std::max(worst, std::abs(rec.sideband.coefficients(c, k) - direct));
        scale = std::max(scale, std::abs(direct));
      }
    }
    o.require(worst <= kSidebandRelTol * scale,
              format("sideband vs G+ G-* max deviation %.2e relative (<= %.0e)", worst / scale, kSidebandRelTol));

    io::write_recon(scratch_ / "c4_recon", rec.greens);
    const auto back = io::read_recon(scratch_ / "c4_recon");
    recon_roundtrip_ = bit_equal(back.magnitude, rec.greens.magnitude) && bit_equal(back.phase, rec.greens.phase) &&
                       bit_equal(back.group_delay, rec.greens.group_delay) && back.mask == rec.greens.mask;

    // Gauge blindness: an output-only phase leaves the reconstruction and
    // every conversion efficiency untouched.
    std::vector<double> chi(sim.greens.out_grid().count());
    for (std::size_t k = 0; k < chi.size(); ++k) {
      const double x = sim.greens.out_grid().offset(k);
      chi[k] = 4e-21 * x * x - 3e-10 * x + 0.7;
    }
    const auto gauged = sim.greens.with_output_phase(chi);
    const auto rec2 = cli::reconstruct(synthesize_sweep(gauged, req), cfg.recon);
    double dmag = 0.0, dphase = 0.0;
    for (Eigen::Index i = 0; i < rec.greens.phase.size(); ++i) {
      dmag = std::max(dmag, std::abs(rec.greens.magnitude.data()[i] - rec2.greens.magnitude.data()[i]));
      if (rec.greens.mask.data()[i])
        dphase = std::max(dphase, std::abs(rec.greens.phase.data()[i] - rec2.greens.phase.data()[i]));
    }
    const auto band = full_band(sim.greens.out_grid());
    const auto lead = schmidt(sim.greens, 1).input_modes[0];
    const double e0 = conversion_efficiency(sim.greens, lead, band), e1 = conversion_efficiency(gauged, lead, band);
    gauge_ok_ = rec.greens.mask == rec2.greens.mask && dmag <= kGaugeTol * rec.greens.magnitude.maxCoeff() &&
                dphase <= kGaugeTol && std::abs(e0 - e1) <= kGaugeTol * e0;
    gauge_note_ = format("gauge: magnitude %.1e, phase %.1e rad, efficiency %.1e relative", dmag / rec.greens.magnitude.maxCoeff(),
                         dphase, std::abs(e0 - e1) / e0);
    return o;
  }

  Outcome pump_chirp_study() {
    Outcome o;
    const auto uc = config("fig1_unchirped.json");
    const auto ch = config("fig1_chirped.json");
    const auto gu = cli::simulate(uc).greens;
    const auto gc = cli::simulate(ch).greens;
    const auto ru = cli::analyze_greens(gu, nullptr, scratch_ / "c5u");
    const auto rc = cli::analyze_greens(gc, &gu, scratch_ / "c5c");

    const double flat = ru["phase_flatness"]["max_deviation_rad"];
    o.require(flat < kFlatPhaseMax, format("unchirped phase flat to %.4f rad (< %.2f)", flat, kFlatPhaseMax));
    const double mismatch = ru["leading_input_mode"]["gaussian_mismatch"];
    const double mode_phase = ru["leading_input_mode"]["max_phase_deviation_in_fwhm_rad"];
    o.require(mismatch < kGaussianMismatchMax && mode_phase < kFlatPhaseMax,
              format("leading mode Gaussian (mismatch %.1e, phase %.4f rad in FWHM)", mismatch, mode_phase));
    const double dmag = rc["study"]["max_magnitude_difference"];
    o.require(dmag < kMagnitudeChangeMax, format("chirped |G| within %.2f%% of unchirped", 100 * dmag));
    for (const char* axis : {"phase_along_input", "phase_along_output"}) {
      const double c2 = rc[axis]["c2_ps2"], res = rc[axis]["rms_residual_rad"];
      o.require(std::abs(c2 - kExpectedC2Ps2) <= kC2RelTol * kExpectedC2Ps2 && res < kQuadraticResidualMax,
                format("%s quadratic: c2 %.2f ps^2, residual %.1e rad", axis, c2, res));
    }
    const double ratio = rc["study"]["ratio"], dur = rc["study"]["duration_ratio"];
    o.require(ratio < kChirpRatioMax, format("unchirped-optimal input keeps %.4f of its efficiency (< %.1f)", ratio, kChirpRatioMax));
    o.require(dur > kDurationRatioMin, format("chirped leading pulse %.3fx longer (> %.1f)", dur, kDurationRatioMin));

    const auto frozen = [&](const char* name, double got, double want) {
      o.require(std::abs(got - want) <= kFrozenRelTol * std::abs(want), format("%s %.6f (frozen %.6f)", name, got, want));
    };
    frozen("ratio", ratio, kFrozenRatio);
    frozen("K unchirped", ru["schmidt_number"], kFrozenSchmidtUnchirped);
    frozen("K chirped", rc["schmidt_number"], kFrozenSchmidtChirped);
    frozen("duration ratio", dur, kFrozenDurationRatio);

    io::write_greens(scratch_ / "c5.qfcg", gc);
    greens_roundtrip_ = bit_equal(io::read_greens(scratch_ / "c5.qfcg").greens.values(), gc.values());
    const auto ts = time_domain_mode(schmidt(gc, 1).input_modes[0], 4096);
    double energy = 0.0;
    for (const auto& v : ts.values) energy += std::norm(v) * ts.dt;
    parseval_error_ = std::abs(energy - 1.0);
    return o;
  }

  Outcome properties() {
    Outcome o;
    // Split-step unitarity well beyond first order.
    auto strong = config("fig1_unchirped.json");
    strong.chain.active.coupling = kStrongCoupling;
    strong.in_grid.count = strong.out_grid.count = kStrongGridCount;
    const auto ss = chain_greens(cli::effective_chain(strong), strong.in_grid.to_grid("in"), strong.out_grid.to_grid("out"),
                                 SimModel::kSplitStep, strong.simulation.dz_m);
    const double peak = std::pow(schmidt(ss.converted, 1).singular_values[0], 2);
    o.require(ss.unitarity_defect() < kUnitarityMax,
              format("split-step unitarity defect %.1e at %.0f%% peak conversion (< %.0e)", ss.unitarity_defect(), 100 * peak,
                     kUnitarityMax));

    // Agreement with the first-order oracle at the bundled low coupling.
    const auto weak = config("fig1_unchirped.json");
    const auto in = weak.in_grid.to_grid("in"), out = weak.out_grid.to_grid("out");
    const auto chain = cli::effective_chain(weak);
    const auto a = chain_greens(chain, in, out, SimModel::kSplitStep, weak.simulation.dz_m);
    const auto b = chain_greens(chain, in, out, SimModel::kBorn);
    const double l2 = relative_l2(a.converted.values(), b.converted.values());
    o.require(l2 < kBornRelL2Max, format("split-step vs Born relative L2 %.2e (< %.2f)", l2, kBornRelL2Max));

    o.require(gauge_ok_, gauge_note_);

    const double scaling = shear_scaling();
    o.require(std::abs(scaling - kShearScalingTarget) <= kShearScalingTol * kShearScalingTarget,
              format("linearization error ratio %.3f per shear doubling (%.0f +/- %.0f%%)", scaling, kShearScalingTarget,
                     100 * kShearScalingTol));
    o.require(parseval_error_ < kParsevalTol, format("Parseval error %.1e (< %.0e)", parseval_error_, kParsevalTol));
    o.require(greens_roundtrip_ && sweep_roundtrip_ && recon_roundtrip_, "greens, sweep and recon files round-trip bit-exactly");
    return o;
  }

 private:
  // Worst |delta_phi / shear - dphi/domega| for a cubic input phase, at a
  // doubled shear over the base shear.
  static double shear_scaling() {
    const double b = 3e-33, base = units::hz_to_omega(560e6);
    const auto in = FrequencyGrid::from_wavelength(1556.0, base / 2, 321, "in");
    const auto out = FrequencyGrid(in.center() * 1.6, in.spacing() * 2, 161, "out");
    Eigen::MatrixXcd m(out.count(), in.count());
    for (std::size_t j = 0; j < in.count(); ++j)
      for (std::size_t k = 0; k < out.count(); ++k) {
        const double x = (out.offset(k) - in.offset(j)) / (40 * in.spacing());
        const double o = in.offset(j);
        m(k, j) = std::polar(0.05 * std::exp(-x * x) / in.spacing(), b * o * o * o);
      }
    const GreensFunction g(out, in, m);
    double err[2];
    for (int i = 0; i < 2; ++i) {
      const double shear = base * (i + 1);
      SweepRequest req;
      for (std::size_t j = 140; j <= 180; j += 2) req.centers.push_back(snap_probe(in, in.omega(j), shear).center);
      for (int n = 0; n < 64; ++n) req.delays_ps.push_back(n * 2 * std::numbers::pi / shear * 1e12 / 16);
      req.shear = shear;
      const auto pd = phase_differences(extract_sideband(synthesize_sweep(g, req)));
      double worst = 0.0;
      for (Eigen::Index k = 0; k < pd.mask.rows(); ++k)
        for (Eigen::Index c = 0; c < pd.mask.cols(); ++c)
          if (pd.mask(k, c)) {
            const double o = req.centers[c] - in.center();
            worst = std::max(worst, std::abs(pd.delta_phi(k, c) / pd.shear - 3 * b * o * o));
          }
      err[i] = worst;
    }
    return err[1] / err[0];
  }

  fs::path configs_;
  fs::path scratch_;
  bool sweep_roundtrip_ = false;
  bool recon_roundtrip_ = false;
  bool greens_roundtrip_ = false;
  bool gauge_ok_ = false;
  std::string gauge_note_ = "gauge blindness not evaluated";
  double parseval_error_ = 1.0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("qfc acceptance suite");
  std::string configs = QFC_CONFIG_DIR;
  app.add_option("--configs", configs, "Directory holding the bundled configurations");
  CLI11_PARSE(app, argc, argv);

  const fs::path scratch = fs::temp_directory_path() / ("qfc_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(scratch);
  Suite suite(configs, scratch);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"dispersion-slope recovery", [&] { return suite.slope_recovery(); }},
      {"noise-matched realism", [&] { return suite.noise_realism(); }},
      {"harmonic robustness", [&] { return suite.harmonics(); }},
      {"phase fidelity", [&] { return suite.phase_fidelity(); }},
      {"chirped-pump mode study", [&] { return suite.pump_chirp_study(); }},
      {"property suites", [&] { return suite.properties(); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failed += o.pass ? 0 : 1;
    std::string summary;
    for (const auto& n : o.notes) summary += (summary.empty() ? "" : "; ") + n;
    std::printf("criterion %zu %s: %s | %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, summary.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(scratch);
  return failed == 0 ? 0 : 1;
}

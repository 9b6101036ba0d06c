#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qfc/cli/pipeline.hpp"
#include "qfc/core/errors.hpp"
#include "qfc/io/config.hpp"
#include "qfc/io/greens_io.hpp"
#include "qfc/io/recon_io.hpp"
#include "qfc/io/report_io.hpp"
#include "qfc/io/sweep_io.hpp"

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kData = 3, kTolerance = 4 };

struct Globals {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  bool verbose = false;
};

qfc::io::ExperimentConfig load(const Globals& g) {
  if (g.config.empty()) throw qfc::ConfigError("", "--config is required for this subcommand");
  auto cfg = qfc::io::load_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

void note(const Globals& g, const std::string& msg) {
  if (g.verbose) std::cerr << "[qfc] " << msg << "\n";
}

void print_warnings(const std::vector<std::string>& w) {
  for (const auto& s : w) std::cerr << "warning: " << s << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-tone tomography toolkit for quantum frequency converters"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Experiment configuration (qfc-sim/1 JSON)");
  app.add_option("--out", g.out, "Output directory; every artifact is written below it");
  app.add_option("--seed", g.seed, "Overrides the configured RNG seed");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
  app.add_flag("--verbose", g.verbose, "Progress messages on stderr");

  auto* simulate = app.add_subcommand("simulate", "Simulate the converter chain and write greens.qfcg");
  bool write_through = false;
  simulate->add_flag("--through", write_through, "Also write through.qfcg, the unconverted input-band transfer");

  auto* synth = app.add_subcommand("synth", "Synthesize a delay-sweep dataset from a Green's function file");
  std::string greens_path;
  synth->add_option("--greens", greens_path, "Input Green's function file")->required();

  auto* reconstruct = app.add_subcommand("reconstruct", "Reconstruct a Green's function from a sweep dataset");
  std::string dataset_dir;
  reconstruct->add_option("--dataset", dataset_dir, "qfc-sweep/1 dataset directory")->required();

  auto* analyze = app.add_subcommand("analyze", "Schmidt or reconstruction report");
  std::string analyze_greens, analyze_reference, analyze_recon;
  analyze->add_option("--greens", analyze_greens, "Green's function file");
  analyze->add_option("--reference", analyze_reference, "Unchirped reference for the efficiency study");
  analyze->add_option("--recon", analyze_recon, "Reconstruction directory");

  auto* compare = app.add_subcommand("compare", "Gauge-invariant comparison of a reconstruction with the truth");
  std::string compare_recon, compare_truth;
  compare->add_option("--recon", compare_recon, "Reconstruction directory")->required();
  compare->add_option("--truth", compare_truth, "Ground-truth Green's function file")->required();

  auto* pipeline = app.add_subcommand("pipeline", "simulate, synth, reconstruct and compare in one run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  const qfc::cli::RunOptions run{g.threads, g.verbose};
  const std::filesystem::path out = g.out;
  try {
    if (*simulate) {
      const auto cfg = load(g);
      note(g, "simulating " + cfg.name);
      const auto sim = qfc::cli::simulate(cfg, run);
      qfc::io::write_greens(out / "greens.qfcg", sim.greens, sim.metadata);
      std::cout << (out / "greens.qfcg").string() << "\n";
      if (write_through && sim.through) {
        qfc::io::write_greens(out / "through.qfcg", *sim.through, sim.metadata);
        std::cout << (out / "through.qfcg").string() << "\n";
      }
    } else if (*synth) {
      const auto cfg = load(g);
      note(g, "reading " + greens_path);
      const auto file = qfc::io::read_greens(greens_path);
      const auto data = qfc::cli::synthesize(cfg, file.greens, run);
      qfc::io::write_sweep(out / "sweep", data);
      qfc::cli::write_fig3b(out / "fig3b.csv", data);
      print_warnings(data.metadata().warnings);
      std::cout << (out / "sweep").string() << "\n";
    } else if (*reconstruct) {
      qfc::io::ReconConfig rc;
      if (!g.config.empty()) rc = load(g).recon;
      const auto data = qfc::io::ingest_sweep(dataset_dir);
      const auto rec = qfc::cli::reconstruct(data, rc);
      qfc::io::write_recon(out / "recon", rec.greens);
      qfc::cli::write_fig4a(out / "fig4a.csv", rec.delays);
      qfc::cli::write_fig5(out / "fig5a.csv", out / "fig5b.csv", rec.greens);
      print_warnings(rec.greens.warnings);
      if (rec.greens.delay_fit)
        std::printf("group-delay slope %.6g ps/nm (stderr %.3g, residual %.4g ps)\n", rec.greens.delay_fit->slope,
                    rec.greens.delay_fit->slope_stderr, rec.greens.delay_fit->rms_residual);
    } else if (*analyze) {
      if (analyze_greens.empty() == analyze_recon.empty())
        throw qfc::ConfigError("", "analyze needs exactly one of --greens or --recon");
      nlohmann::json report;
      if (!analyze_greens.empty()) {
        const auto gf = qfc::io::read_greens(analyze_greens);
        std::optional<qfc::io::GreensFile> ref;
        if (!analyze_reference.empty()) ref = qfc::io::read_greens(analyze_reference);
        report = qfc::cli::analyze_greens(gf.greens, ref ? &ref->greens : nullptr, out);
      } else {
        report = qfc::cli::analyze_recon(qfc::io::read_recon(analyze_recon), out);
      }
      std::cout << report.dump(2) << "\n";
    } else if (*compare) {
      const auto recon = qfc::io::read_recon(compare_recon);
      const auto truth = qfc::io::read_greens(compare_truth);
      const auto m = qfc::compare_gauge_invariant(recon, truth.greens);
      const nlohmann::json j{{"phase_rmse_rad", m.phase_rmse},
                             {"magnitude_correlation", m.magnitude_correlation},
                             {"recon_slope_ps_per_nm", m.recon_slope},
                             {"truth_slope_ps_per_nm", m.truth_slope},
                             {"slope_error_ps_per_nm", m.slope_error},
                             {"efficiency_error", m.efficiency_error},
                             {"compared_points", m.compared_points}};
      qfc::io::write_report(out / "metrics.json", "compare", j);
      std::cout << j.dump(2) << "\n";
    } else if (*pipeline) {
      const auto cfg = load(g);
      const auto t0 = std::chrono::steady_clock::now();
      const auto summary = qfc::cli::run_pipeline(cfg, out, run);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      print_warnings(summary.warnings);
      std::cout << summary.table();
      std::printf("%-28s %14.3f\n", "runtime [s]", secs);
      return summary.all_pass() ? kOk : kTolerance;
    }
  } catch (const qfc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const qfc::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kTolerance;
  } catch (const qfc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}

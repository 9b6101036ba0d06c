#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "qfc/io/csv.hpp"
#include "qfc/io/greens_io.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = QFC_SOURCE_DIR;
const fs::path kBinary = QFC_BINARY;

struct Scratch {
  fs::path path;
  explicit Scratch(const std::string& tag)
      : path(fs::temp_directory_path() / ("qfc_cli_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Scratch() { fs::remove_all(path); }
};

struct Run {
  int code;
  std::string err;
};

// Runs the CLI with stdout discarded and stderr captured.
Run run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path err = scratch / "stderr.txt";
  const std::string cmd = kBinary.string() + " " + args + " >/dev/null 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Run r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, ""};
  if (fs::exists(err)) r.err = qfc::io::read_file(err);
  return r;
}

json bundled(const std::string& name) { return json::parse(qfc::io::read_file(kSource / "configs" / name)); }

fs::path write_config(const fs::path& dir, const std::string& name, const json& j) {
  const fs::path p = dir / name;
  qfc::io::write_file(p, j.dump(2));
  return p;
}

// A quick noisy run: the bundled validation setup on fewer input points.
json small_noisy() {
  json j = bundled("validation_noisy.json");
  j["grids"]["in"]["count"] = 3001;
  j["probe"]["center_start_nm"] = 1554.0;
  j["probe"]["center_stop_nm"] = 1559.0;
  j["probe"]["center_count"] = 11;
  return j;
}

}  // namespace

TEST_CASE("configuration errors exit with code 2") {
  Scratch s("config");
  json neg = bundled("validation.json");
  neg["chain"]["pre"]["length"] = -1.9;
  const auto r = run_cli("--config " + write_config(s.path, "neg.json", neg).string() + " --out " + s.path.string() + " simulate",
                     s.path);
  CHECK(r.code == 2);
  CHECK(r.err.find("/chain/pre/length") != std::string::npos);

  json unknown = bundled("validation.json");
  unknown["probe"]["centre_count"] = 3;
  CHECK(run_cli("--config " + write_config(s.path, "u.json", unknown).string() + " simulate", s.path).code == 2);
  CHECK(run_cli("--config " + (s.path / "absent.json").string() + " simulate", s.path).code == 2);
  CHECK(run_cli("simulate", s.path).code == 2);
  CHECK(run_cli("--threads many simulate", s.path).code == 2);
  CHECK(run_cli("synth", s.path).code == 2);
}

TEST_CASE("a zero-length chain passes the input band through unchanged") {
  Scratch s("zero");
  json j = bundled("validation.json");
  j["grids"]["in"]["count"] = 64;
  j["chain"]["pre"]["length"] = 0.0;
  j["chain"]["active"]["active_length"] = 0.0;
  j["probe"]["center_start_nm"] = 1556.48;
  j["probe"]["center_stop_nm"] = 1556.48;
  j["probe"]["center_count"] = 1;
  const auto cfg = write_config(s.path, "zero.json", j);
  REQUIRE(run_cli("--config " + cfg.string() + " --out " + s.path.string() + " simulate --through", s.path).code == 0);
  const auto through = qfc::io::read_greens(s.path / "through.qfcg").greens;
  CHECK(through.values() == qfc::GreensFunction::identity(through.in_grid()).values());
  const auto converted = qfc::io::read_greens(s.path / "greens.qfcg").greens;
  CHECK(converted.values().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("the bundled unchirped-pump configuration yields a flat phase") {
  Scratch s("fig1");
  const auto cfg = kSource / "configs" / "fig1_unchirped.json";
  REQUIRE(run_cli("--config " + cfg.string() + " --out " + s.path.string() + " simulate", s.path).code == 0);
  REQUIRE(run_cli("--out " + (s.path / "a").string() + " analyze --greens " + (s.path / "greens.qfcg").string(), s.path).code ==
          0);
  const auto report = json::parse(qfc::io::read_file(s.path / "a" / "report.json"));
  CHECK(report["metrics"]["phase_flatness"]["max_deviation_rad"].get<double>() < 0.05);
  CHECK(fs::exists(s.path / "a" / "fig1a.csv"));
}

TEST_CASE("reconstruction rejects a dataset with the wrong shear") {
  Scratch s("shear");
  const auto cfg = write_config(s.path, "small.json", small_noisy());
  const std::string base = "--config " + cfg.string() + " --out " + s.path.string();
  REQUIRE(run_cli(base + " simulate", s.path).code == 0);
  REQUIRE(run_cli(base + " synth --greens " + (s.path / "greens.qfcg").string(), s.path).code == 0);
  const fs::path meta = s.path / "sweep" / "metadata.json";
  REQUIRE(fs::exists(meta));
  CHECK(run_cli(base + " reconstruct --dataset " + (s.path / "sweep").string(), s.path).code == 0);

  json m = json::parse(qfc::io::read_file(meta));
  m["shear"] = m["shear"].get<double>() * 1.37;
  qfc::io::write_file(meta, m.dump());
  const auto r = run_cli(base + " reconstruct --dataset " + (s.path / "sweep").string(), s.path);
  CHECK(r.code == 3);
  CHECK(r.err.find("sideband") != std::string::npos);
}

TEST_CASE("failed tolerances exit with code 4") {
  Scratch s("tol");
  json j = small_noisy();
  j["noise"] = {{"profile", "none"}};
  j["tolerances"] = {{"slope_expected_ps_per_nm", 30.0}, {"slope_tolerance_ps_per_nm", 0.3}};
  const auto cfg = write_config(s.path, "tol.json", j);
  CHECK(run_cli("--config " + cfg.string() + " --out " + s.path.string() + " pipeline", s.path).code == 4);
  j["tolerances"]["slope_expected_ps_per_nm"] = 34.2;
  write_config(s.path, "tol.json", j);
  CHECK(run_cli("--config " + cfg.string() + " --out " + s.path.string() + " pipeline", s.path).code == 0);
}

TEST_CASE("pipeline output does not depend on the thread count") {
  Scratch s("det");
  const auto cfg = write_config(s.path, "small.json", small_noisy());
  for (const char* t : {"1", "4", "0"})
    REQUIRE(run_cli("--config " + cfg.string() + " --threads " + t + " --out " + (s.path / t).string() + " pipeline", s.path)
                .code != 1);
  for (const char* f : {"summary.json", "greens.qfcg", "sweep/center_005.csv", "recon/magnitude.csv",
                        "recon/group_delay.csv", "fig4a.csv"}) {
    const auto one = qfc::io::read_file(s.path / "1" / f);
    CHECK_MESSAGE(one == qfc::io::read_file(s.path / "4" / f), f);
    CHECK_MESSAGE(one == qfc::io::read_file(s.path / "0" / f), f);
  }
}

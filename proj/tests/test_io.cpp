#include <bit>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <unistd.h>

#include "doctest.h"
#include "qfc/core/errors.hpp"
#include "qfc/io/config.hpp"
#include "qfc/io/csv.hpp"
#include "qfc/io/greens_io.hpp"
#include "qfc/io/recon_io.hpp"
#include "qfc/io/report_io.hpp"
#include "qfc/io/sweep_io.hpp"
#include "qfc/measure/dataset.hpp"
#include "qfc/recon/sideband.hpp"
#include "test_support.hpp"

using namespace qfc;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per call, removed when the guard goes away.
struct ScratchDir {
  fs::path path;
  explicit ScratchDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("qfc_io_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchDir() { fs::remove_all(path); }
};

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (!(same_bits(a.data()[i], b.data()[i]) || (std::isnan(a.data()[i]) && std::isnan(b.data()[i])))) return false;
  return true;
}

GreensFunction awkward_kernel() {
  const auto in = FrequencyGrid::from_wavelength(1556.123456789, 3.3e9, 17, "in");
  const auto out = FrequencyGrid::from_wavelength(922.63, 5.6e9, 13, "out");
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  Eigen::MatrixXcd m(13, 17);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = cplx(d(rng), d(rng)) * std::pow(10.0, -12 + 3 * d(rng));
  m(0, 0) = cplx(std::numeric_limits<double>::denorm_min(), -0.0);
  m(1, 2) = cplx(1.0 / 3.0, std::numeric_limits<double>::max());
  return GreensFunction(out, in, m);
}

DelaySweepDataset small_sweep(std::uint64_t seed) {
  const auto in = qfc::testing::half_shear_grid(1556.0, 560e6, 81);
  const auto out = FrequencyGrid(in.center() * 1.6, in.spacing() * 2, 41, "out");
  const auto g = qfc::testing::ridge_kernel(in, out, 12 * in.spacing(), [](double o) { return 2e-21 * o * o; });
  SweepRequest req;
  for (std::size_t j = 20; j <= 60; j += 2) req.centers.push_back(in.omega(j));
  for (int i = 0; i <= 8; ++i) req.delays_ps.push_back(500.0 * i);
  req.shear = 2 * in.spacing();
  req.noise = {0.01, 0.01, seed};
  return synthesize_sweep(g, req);
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("numbers survive formatting bit for bit") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20000; ++i) {
    const double v = std::bit_cast<double>(rng());
    if (std::isnan(v)) continue;
    double back = 0.0;
    REQUIRE(io::parse_number(io::format_number(v), back));
    CHECK(same_bits(v, back));
  }
  double x = 0.0;
  CHECK(io::parse_number("nan", x));
  CHECK(std::isnan(x));
  CHECK(io::parse_number("-inf", x));
  CHECK(x == -std::numeric_limits<double>::infinity());
  for (const char* bad : {"", " 1", "1.0x", "0x10", "1,5", "--1"}) CHECK_FALSE(io::parse_number(bad, x));
}

TEST_CASE("CSV framing errors carry their location") {
  const auto t = io::parse_csv("a,b\n1,2\n3,4\n", "t.csv");
  CHECK(t.rows == 2);
  CHECK(t.at(1, 0) == 3.0);
  CHECK(t.row_offsets[1] == 8);

  try {
    io::parse_csv("a,b\n1,2\n3,4", "cut.csv", 100);
    FAIL("expected a framing error");
  } catch (const ParseError& e) {
    CHECK(e.byte_offset() == 111);
    CHECK(e.file() == "cut.csv");
  }
  try {
    io::parse_csv("a,b\n1,2\n3\n", "short.csv");
    FAIL("expected a field-count error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
    CHECK(e.byte_offset() == 9);  // end of the short record
  }
  try {
    io::parse_csv("a,b\n1,x\n", "word.csv");
    FAIL("expected a number error");
  } catch (const ParseError& e) {
    CHECK(e.column() == 2);
  }
  CHECK_THROWS_AS(io::parse_csv("", "empty.csv"), ParseError);
}

TEST_CASE("Green's function files") {
  ScratchDir dir("greens");
  const auto g = awkward_kernel();
  const auto file = dir.path / "g.qfcg";
  io::write_greens(file, g, {{"model", "closed_form"}, {"seed", 7}});
  const auto back = io::read_greens(file);
  CHECK(back.greens.in_grid() == g.in_grid());
  CHECK(back.greens.out_grid() == g.out_grid());
  CHECK(back.greens.in_grid().label() == "in");
  CHECK(back.metadata["model"] == "closed_form");
  bool exact = true;
  for (Eigen::Index i = 0; i < g.values().size(); ++i) {
    exact = exact && same_bits(g.values().data()[i].real(), back.greens.values().data()[i].real()) &&
            same_bits(g.values().data()[i].imag(), back.greens.values().data()[i].imag());
  }
  CHECK(exact);

  const std::string text = io::read_file(file);
  SUBCASE("cut mid-record") {
    io::write_file(file, text.substr(0, text.size() - 7));
    try {
      io::read_greens(file);
      FAIL("expected a framing error");
    } catch (const ParseError& e) {
      CHECK(e.byte_offset() == text.size() - 7);
    }
  }
  SUBCASE("cut between records") {
    const auto last = text.rfind('\n', text.size() - 2);
    io::write_file(file, text.substr(0, last + 1));
    CHECK_THROWS_WITH_AS(io::read_greens(file), doctest::Contains("truncated body"), ParseError);
  }
  SUBCASE("records out of order") {
    const auto first = text.find('\n', text.find('\n') + 1) + 1;
    io::write_file(file, replace_once(text, text.substr(first, 4), "0,1,"));
    CHECK_THROWS_WITH_AS(io::read_greens(file), doctest::Contains("out of order"), ParseError);
  }
  SUBCASE("wrong schema") {
    io::write_file(file, replace_once(text, io::kGreensSchema, "qfc-greens/9"));
    CHECK_THROWS_WITH_AS(io::read_greens(file), doctest::Contains("schema mismatch"), ParseError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(io::read_greens(dir.path / "none.qfcg"), ParseError); }
}

TEST_CASE("delay-sweep datasets") {
  ScratchDir dir("sweep");
  const auto data = small_sweep(3);
  io::write_sweep(dir.path / "s", data);
  const auto back = io::ingest_sweep(dir.path / "s");
  CHECK(back.out_grid() == data.out_grid());
  CHECK(back.centers() == data.centers());
  CHECK(back.delays_ps() == data.delays_ps());
  CHECK(back.intensities() == data.intensities());
  CHECK(back.metadata().shear == data.metadata().shear);
  CHECK(back.metadata().noise.seed == 3);
  CHECK(back.metadata().noise.additive_sigma == 0.01);

  const auto csv = dir.path / "s" / io::center_file_name(4);
  const std::string text = io::read_file(csv);
  SUBCASE("shuffled delay columns") {
    io::write_file(csv, replace_once(text, "out_index,0,500,", "out_index,500,0,"));
    try {
      io::ingest_sweep(dir.path / "s");
      FAIL("expected an ordering error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("delays not increasing") != std::string::npos);
      CHECK(e.column() == 3);
    }
  }
  SUBCASE("truncated center file") {
    io::write_file(csv, text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(io::ingest_sweep(dir.path / "s"), ParseError);
  }
  SUBCASE("negative intensity") {
    const auto row = text.find('\n') + 1;
    const auto cell = text.find(',', row) + 1;
    io::write_file(csv, text.substr(0, cell) + "-1" + text.substr(text.find(',', cell)));
    CHECK_THROWS_WITH_AS(io::ingest_sweep(dir.path / "s"), doctest::Contains("negative"), ParseError);
  }
  SUBCASE("metadata delays out of order") {
    const auto meta = dir.path / "s" / "metadata.json";
    auto j = nlohmann::json::parse(io::read_file(meta));
    std::swap(j["delays_ps"][0], j["delays_ps"][1]);
    io::write_file(meta, j.dump());
    CHECK_THROWS_WITH_AS(io::ingest_sweep(dir.path / "s"), doctest::Contains("delays not increasing"), ParseError);
  }
}

TEST_CASE("reconstruction directories") {
  ScratchDir dir("recon");
  const auto sb = extract_sideband(small_sweep(9));
  PhaseOptions opts;
  opts.mask_intervals.push_back({923.0, 923.1, MaskAxis::kOut});
  const auto pd = phase_differences(sb, opts);
  auto r = integrate_phase(pd, sb);
  r.warnings.push_back("note, with a comma");
  io::write_recon(dir.path / "r", r);
  const auto back = io::read_recon(dir.path / "r");
  CHECK(back.out_grid == r.out_grid);
  CHECK(back.centers == r.centers);
  CHECK(same_matrix(back.magnitude, r.magnitude));
  CHECK(same_matrix(back.phase, r.phase));
  CHECK(same_matrix(back.group_delay, r.group_delay));
  CHECK(back.mask == r.mask);
  CHECK(back.shear == r.shear);
  CHECK(back.warnings == r.warnings);
  REQUIRE(back.mask_intervals.size() == 1);
  CHECK(back.mask_intervals[0].hi_nm == 923.1);
  REQUIRE(back.delay_fit);
  CHECK(back.delay_fit->slope == r.delay_fit->slope);
  CHECK(back.delay_fit->points == r.delay_fit->points);

  const auto long_table = io::parse_csv(io::read_file(dir.path / "r" / "phase_long.csv"), "phase_long.csv");
  CHECK(long_table.header == std::vector<std::string>{"lambda_in_nm", "lambda_out_nm", "value"});
  CHECK(long_table.rows == static_cast<std::size_t>(r.mask.count()));

  const auto mag = dir.path / "r" / "magnitude.csv";
  const std::string text = io::read_file(mag);
  io::write_file(mag, text.substr(0, text.size() - 3));
  CHECK_THROWS_AS(io::read_recon(dir.path / "r"), ParseError);
}

TEST_CASE("configuration files") {
  const fs::path src = QFC_SOURCE_DIR;
  const auto cfg = io::load_config(src / "configs" / "validation.json");
  CHECK(cfg.in_grid.count == 4901);
  CHECK(cfg.chain.pre.length_km == 1.9);
  CHECK(cfg.tolerances.slope_expected_ps_per_nm.value() == 34.2);
  const auto j = io::config_to_json(cfg);
  CHECK(io::config_to_json(io::parse_config(j)) == j);

  for (const char* name : {"validation_noisy.json", "fig1_unchirped.json", "fig1_chirped.json"}) {
    const auto c = io::load_config(src / "configs" / name);
    CHECK(io::config_to_json(io::parse_config(io::config_to_json(c))) == io::config_to_json(c));
  }

  const auto expect_pointer = [&](nlohmann::json bad, const std::string& pointer) {
    try {
      io::parse_config(bad);
      FAIL("expected a config error at " << pointer);
    } catch (const ConfigError& e) {
      CHECK(e.pointer() == pointer);
    }
  };
  auto raw = nlohmann::json::parse(io::read_file(src / "configs" / "validation.json"));
  {
    auto b = raw;
    b["chain"]["pre"]["length"] = -1.0;
    expect_pointer(b, "/chain/pre/length");
  }
  {
    auto b = raw;
    b["chain"]["active"]["pump_p"]["duration"] = 35.0;
    expect_pointer(b, "/chain/active/pump_p/duration");
  }
  {
    auto b = raw;
    b["grids"]["in"]["count"] = "many";
    expect_pointer(b, "/grids/in/count");
  }
  {
    auto b = raw;
    b["simulation"]["model"] = "magic";
    expect_pointer(b, "/simulation/model");
  }
  {
    auto b = raw;
    b["noise"] = {{"profile", "experiment-like"}, {"additive_sigma", 0.1}};
    expect_pointer(b, "/noise/additive_sigma");
  }
  {
    auto b = raw;
    b["schema"] = "qfc-sim/0";
    CHECK_THROWS_AS(io::parse_config(b), ConfigError);
  }
  CHECK_THROWS_AS(io::load_config(src / "configs" / "missing.json"), ConfigError);

  const auto noisy = io::load_config(src / "configs" / "validation_noisy.json");
  CHECK(noisy.noise_spec().additive_sigma == io::kExperimentAdditiveSigma);
  CHECK(noisy.noise_spec().multiplicative_sigma == io::kExperimentMultiplicativeSigma);
}

TEST_CASE("reports") {
  ScratchDir dir("report");
  const nlohmann::json metrics{{"ratio", 0.40881786432853867}, {"values", {1.0, 2.5}}};
  io::write_report(dir.path / "a" / "report.json", "analysis", metrics);
  const auto back = io::read_report(dir.path / "a" / "report.json");
  CHECK(back["kind"] == "analysis");
  CHECK(back["metrics"] == metrics);
  CHECK(back["metrics"]["ratio"].get<double>() == 0.40881786432853867);
}

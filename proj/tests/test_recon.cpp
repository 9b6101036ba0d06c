#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qfc/core/errors.hpp"
#include "qfc/measure/probe.hpp"
#include "qfc/recon/phase.hpp"
#include "qfc/recon/sideband.hpp"
#include "test_support.hpp"

using namespace qfc;
using qfc::testing::half_shear_grid;
using qfc::testing::ridge_kernel;

namespace {

constexpr double kShearHz = 560e6;

struct Fixture {
  FrequencyGrid in = half_shear_grid(1556.0, kShearHz, 161);
  FrequencyGrid out = FrequencyGrid(in.center() * 1.6, in.spacing() * 2, 101, "out");
  double shear = 2 * in.spacing();
  double ridge = 25 * in.spacing();
};

std::vector<double> delays_0_to_4ns() {
  std::vector<double> d;
  for (int i = 0; i <= 8; ++i) d.push_back(500.0 * i);
  return d;
}

// Centers on every grid point from `first` to `last`, stepping `stride`.
std::vector<double> dense_centers(const FrequencyGrid& in, std::size_t first, std::size_t last, std::size_t stride) {
  std::vector<double> c;
  for (std::size_t j = first; j <= last; j += stride) c.push_back(in.omega(j));
  return c;
}

DelaySweepDataset sweep(const GreensFunction& g, std::vector<double> centers, std::vector<double> delays,
                        double shear, NoiseSpec noise = {}) {
  SweepRequest req;
  req.centers = std::move(centers);
  req.delays_ps = std::move(delays);
  req.shear = shear;
  req.noise = noise;
  return synthesize_sweep(g, req);
}

DelaySweepDataset single_trace(const std::vector<double>& delays, double shear,
                               const std::function<double(double)>& f) {
  std::vector<double> v;
  for (double t : delays) v.push_back(f(t));
  SweepMetadata meta;
  meta.shear = shear;
  return DelaySweepDataset(FrequencyGrid(1.2e15, 1e9, 2), {1.2e15}, delays,
                           [&] {
                             std::vector<double> both = v;
                             both.insert(both.end(), v.begin(), v.end());
                             return both;
                           }(),
                           meta);
}

double rms_wrapped(const Eigen::ArrayXd& d) {
  return std::sqrt(d.unaryExpr([](double x) { return std::pow(std::remainder(x, 2 * std::numbers::pi), 2); }).mean());
}

}  // namespace

TEST_CASE("uniform sweep with factor one is returned unchanged") {
  Fixture f;
  const auto g = ridge_kernel(f.in, f.out, f.ridge);
  const auto ds = sweep(g, dense_centers(f.in, 70, 90, 10), delays_0_to_4ns(), f.shear);
  const auto same = resample_uniform(ds, 1);
  CHECK(same.intensities() == ds.intensities());
  CHECK(same.delays_ps() == ds.delays_ps());
}

TEST_CASE("resampling reproduces a band-limited beat exactly") {
  const double shear = units::hz_to_omega(kShearHz);
  const double period = 1e12 / kShearHz;
  std::vector<double> delays;
  for (double t = 0.0; t <= 2 * period; t += 500.0) delays.push_back(t);
  const auto beat = [&](double t) { return 1.0 + 0.6 * std::cos(shear * t * 1e-12 + 0.3); };
  const auto ds = single_trace(delays, shear, beat);
  const auto up = resample_uniform(ds, 8);
  CHECK(up.delay_count() == (delays.size() - 1) * 8 + 1);
  double ss = 0.0;
  for (std::size_t i = 0; i < up.delay_count(); ++i) ss += std::pow(up.at(0, 0, i) - beat(up.delays_ps()[i]), 2);
  CHECK(std::sqrt(ss / up.delay_count()) < 1e-9);
}

TEST_CASE("resampling needs one full beat period") {
  const double shear = units::hz_to_omega(kShearHz);
  const auto ds = single_trace({0, 500, 1000}, shear, [](double) { return 1.0; });
  CHECK_THROWS_AS(resample_uniform(ds, 4), ConsistencyError);
  CHECK_THROWS_AS(extract_sideband(ds), ConsistencyError);
}

TEST_CASE("jittered delays still give the exact beat phase") {
  Fixture f;
  const auto g = ridge_kernel(f.in, f.out, f.ridge, [](double o) { return 0.7e-9 * o + 3e-22 * o * o; });
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> jitter(-50.0, 50.0);
  std::vector<double> delays = delays_0_to_4ns();
  for (double& d : delays) d += jitter(rng);
  const auto centers = dense_centers(f.in, 60, 100, 20);
  const auto sb = extract_sideband(resample_uniform(sweep(g, centers, delays, f.shear), 8));
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const auto t = tone_indices(f.in, TwoToneProbe{centers[c], f.shear});
    for (std::size_t k = 0; k < f.out.count(); ++k) {
      const cplx truth = g.values()(k, t.plus) * std::conj(g.values()(k, t.minus));
      if (std::abs(truth) < 1e-6 * sb.coefficients.cwiseAbs().maxCoeff()) continue;
      CHECK(std::abs(std::remainder(std::arg(sb.coefficients(c, k)) - std::arg(truth), 2 * std::numbers::pi)) < 1e-3);
    }
  }
}

TEST_CASE("sideband extraction matches the product of the two columns") {
  Fixture f;
  const auto g = ridge_kernel(f.in, f.out, f.ridge, [](double o) { return 1.1e-9 * o - 5e-22 * o * o; });
  const auto centers = dense_centers(f.in, 50, 110, 15);
  const auto sb = extract_sideband(resample_uniform(sweep(g, centers, delays_0_to_4ns(), f.shear), 8));
  REQUIRE_FALSE(sb.warnings.empty());  // 4 ns is not a whole number of beats
  double worst = 0.0, scale = 0.0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const auto t = tone_indices(f.in, TwoToneProbe{centers[c], f.shear});
    for (std::size_t k = 0; k < f.out.count(); ++k) {
      const cplx truth = g.values()(k, t.plus) * std::conj(g.values()(k, t.minus));
      const double dc = std::norm(g.values()(k, t.plus)) + std::norm(g.values()(k, t.minus));
      worst = std::max(worst, std::abs(sb.coefficients(c, k) - truth));
      worst = std::max(worst, std::abs(sb.dc(c, k) - dc));
      scale = std::max(scale, std::abs(truth));
      CHECK(std::abs(sb.coefficients(c, k)) <= 0.5 * sb.dc(c, k) * (1 + 1e-9) + 1e-12 * scale);
    }
  }
  CHECK(worst < 1e-9 * scale);
}

TEST_CASE("delay shift multiplies the coefficient by the beat phase") {
  Fixture f;
  const auto g = ridge_kernel(f.in, f.out, f.ridge, [](double o) { return 0.3e-9 * o; });
  const double delta_ps = 137.0;
  std::vector<double> shifted;
  for (double d : delays_0_to_4ns()) shifted.push_back(d + delta_ps);
  const auto centers = dense_centers(f.in, 80, 80, 1);
  // Advancing the sweep: sample at tau + delta but label the samples tau.
  const auto advanced = sweep(g, centers, shifted, f.shear);
  const DelaySweepDataset relabelled(advanced.out_grid(), advanced.centers(), delays_0_to_4ns(),
                                     advanced.intensities(), advanced.metadata());
  const auto a = extract_sideband(sweep(g, centers, delays_0_to_4ns(), f.shear));
  const auto b = extract_sideband(relabelled);
  const cplx factor = std::polar(1.0, f.shear * delta_ps * 1e-12);
  const double scale = a.coefficients.cwiseAbs().maxCoeff();
  for (std::size_t k = 0; k < f.out.count(); ++k)
    CHECK(std::abs(b.coefficients(0, k) - a.coefficients(0, k) * factor) < 1e-12 * scale);
}

TEST_CASE("projection at twice the shear sees nothing") {
  const double shear = units::hz_to_omega(kShearHz);
  const double period = 1e12 / kShearHz;
  std::vector<double> delays;
  for (int i = 0; i < 64; ++i) delays.push_back(i * 2 * period / 64);
  auto ds = single_trace(delays, shear, [&](double t) { return 2.0 + std::cos(shear * t * 1e-12 - 1.0); });
  SweepMetadata meta = ds.metadata();
  meta.shear = 2 * shear;
  const DelaySweepDataset doubled(ds.out_grid(), ds.centers(), ds.delays_ps(), ds.intensities(), meta);
  const auto at_shear = extract_sideband(ds);
  const auto at_double = extract_sideband(doubled, 0.0);
  CHECK(std::abs(at_double.coefficients(0, 0)) < 1e-10 * std::abs(at_shear.coefficients(0, 0)));
  CHECK_THROWS_AS(extract_sideband(doubled), ConsistencyError);
}

TEST_CASE("phase differences of known phases") {
  Fixture f;
  const auto centers = dense_centers(f.in, 40, 120, 2);
  SUBCASE("flat") {
    const auto g = ridge_kernel(f.in, f.out, f.ridge);
    const auto pd = phase_differences(extract_sideband(sweep(g, centers, delays_0_to_4ns(), f.shear)));
    for (Eigen::Index k = 0; k < pd.mask.rows(); ++k)
      for (Eigen::Index c = 0; c < pd.mask.cols(); ++c)
        if (pd.mask(k, c)) CHECK(std::abs(pd.delta_phi(k, c)) < 1e-9);
  }
  SUBCASE("linear") {
    const double T = 0.37e-9;
    const auto g = ridge_kernel(f.in, f.out, f.ridge, [=](double o) { return o * T; });
    const auto pd = phase_differences(extract_sideband(sweep(g, centers, delays_0_to_4ns(), f.shear)));
    for (Eigen::Index k = 0; k < pd.mask.rows(); ++k)
      for (Eigen::Index c = 0; c < pd.mask.cols(); ++c)
        if (pd.mask(k, c))
          CHECK(std::abs(std::remainder(pd.delta_phi(k, c) - f.shear * T, 2 * std::numbers::pi)) < 1e-9);
  }
  SUBCASE("quadratic") {
    const double a = 4e-22;  // s^2
    const auto g = ridge_kernel(f.in, f.out, f.ridge, [=](double o) { return a * o * o; });
    const auto pd = phase_differences(extract_sideband(sweep(g, centers, delays_0_to_4ns(), f.shear)));
    for (Eigen::Index k = 0; k < pd.mask.rows(); ++k)
      for (Eigen::Index c = 0; c + 1 < pd.mask.cols(); ++c)
        if (pd.mask(k, c) && pd.mask(k, c + 1)) {
          const double slope = (pd.delta_phi(k, c + 1) - pd.delta_phi(k, c)) / (centers[c + 1] - centers[c]);
          CHECK(slope == doctest::Approx(2 * a * f.shear).epsilon(1e-6));
        }
  }
}

TEST_CASE("masking and unwrapping") {
  Fixture f;
  const auto centers = dense_centers(f.in, 40, 120, 2);
  // Steep group delay so the raw phase wraps many times along the centers.
  const auto g = ridge_kernel(f.in, f.out, f.ridge, [](double o) { return 1.5e-20 * o * o; });
  const auto sb = extract_sideband(sweep(g, centers, delays_0_to_4ns(), f.shear));
  PhaseOptions opt;
  const double hole_nm = units::omega_to_wavelength_nm(centers[20]);
  opt.mask_intervals.push_back({hole_nm - 1e-4, hole_nm + 1e-4, MaskAxis::kIn});
  const auto pd = phase_differences(sb, opt);
  bool saw_segmented = false;
  for (Eigen::Index k = 0; k < pd.mask.rows(); ++k) {
    CHECK_FALSE(pd.mask(k, 20));
    saw_segmented = saw_segmented || pd.row_segmented[k];
    for (Eigen::Index c = 0; c + 1 < pd.mask.cols(); ++c)
      if (pd.mask(k, c) && pd.mask(k, c + 1)) CHECK(std::abs(pd.delta_phi(k, c + 1) - pd.delta_phi(k, c)) < std::numbers::pi);
  }
  CHECK(saw_segmented);
  CHECK_THROWS_AS(phase_differences(sb, PhaseOptions{1.5, 1e-3, {}}), PreconditionError);
}

TEST_CASE("group delay fit of a linear delay-versus-wavelength law") {
  Fixture f;
  const auto centers = dense_centers(f.in, 20, 140, 8);
  SUBCASE("no dispersion gives zero slope") {
    const auto g = ridge_kernel(f.in, f.out, f.ridge, [](double o) { return 0.2e-9 * o; });
    const auto gd = group_delay_map(phase_differences(extract_sideband(sweep(g, centers, delays_0_to_4ns(), f.shear))));
    CHECK(std::abs(gd.fit.slope) < 1e-6);
    for (std::size_t c = 0; c < centers.size(); ++c)
      if (gd.center_valid[c]) CHECK(gd.center_tau_ps[c] == doctest::Approx(200.0).epsilon(1e-9));
  }
}

TEST_CASE("phase integration") {
  Fixture f;
  const auto centers = dense_centers(f.in, 30, 130, 2);
  SUBCASE("zero phase differences integrate to zero") {
    const auto g = ridge_kernel(f.in, f.out, f.ridge);
    const auto sb = extract_sideband(sweep(g, centers, delays_0_to_4ns(), f.shear));
    const auto r = integrate_phase(phase_differences(sb), sb);
    for (Eigen::Index k = 0; k < r.phase.rows(); ++k)
      for (Eigen::Index c = 0; c < r.phase.cols(); ++c)
        if (r.mask(k, c)) CHECK(std::abs(r.phase(k, c)) < 1e-9);
  }
  SUBCASE("spacing and uniformity preconditions") {
    const auto g = ridge_kernel(f.in, f.out, f.ridge);
    const auto coarse = extract_sideband(sweep(g, dense_centers(f.in, 30, 130, 4), delays_0_to_4ns(), f.shear));
    CHECK_THROWS_AS(integrate_phase(phase_differences(coarse), coarse), PreconditionError);
    auto uneven = centers;
    uneven.erase(uneven.begin() + 3);
    const auto sb = extract_sideband(sweep(g, uneven, delays_0_to_4ns(), f.shear));
    CHECK_THROWS_AS(integrate_phase(phase_differences(sb), sb), PreconditionError);
  }
  SUBCASE("cubic phase is recovered and rows have zero mean") {
    const double b = 2e-33;
    const auto g = ridge_kernel(f.in, f.out, f.ridge, [=](double o) { return b * o * o * o; });
    const auto sb = extract_sideband(sweep(g, centers, delays_0_to_4ns(), f.shear));
    const auto r = integrate_phase(phase_differences(sb), sb);
    for (Eigen::Index k = 0; k < r.phase.rows(); ++k) {
      std::vector<double> diff;
      double mean = 0.0;
      for (Eigen::Index c = 0; c < r.phase.cols(); ++c)
        if (r.mask(k, c)) {
          const double o = centers[c] - f.in.center();
          diff.push_back(r.phase(k, c) - b * o * o * o);
          mean += r.phase(k, c);
        }
      if (diff.empty()) continue;
      CHECK(std::abs(mean) < 1e-9 * diff.size());
      Eigen::ArrayXd d = Eigen::Map<Eigen::ArrayXd>(diff.data(), diff.size());
      d -= d.mean();
      CHECK(rms_wrapped(d) < 0.05);
    }
  }
}

TEST_CASE("output-side phases never reach the reconstruction") {
  Fixture f;
  const auto centers = dense_centers(f.in, 30, 130, 2);
  const auto in_phase = [](double o) { return 0.5e-9 * o + 2e-21 * o * o; };
  const auto g0 = ridge_kernel(f.in, f.out, f.ridge, in_phase);
  const auto g1 = ridge_kernel(f.in, f.out, f.ridge, in_phase, [](double o) { return 3e-21 * o * o - 0.2e-9 * o + 1.0; });
  const auto run = [&](const GreensFunction& g) {
    const auto sb = extract_sideband(resample_uniform(sweep(g, centers, delays_0_to_4ns(), f.shear), 4));
    return integrate_phase(phase_differences(sb), sb);
  };
  const auto a = run(g0), b = run(g1);
  CHECK(a.mask == b.mask);
  for (Eigen::Index k = 0; k < a.phase.rows(); ++k)
    for (Eigen::Index c = 0; c < a.phase.cols(); ++c) {
      CHECK(std::abs(a.magnitude(k, c) - b.magnitude(k, c)) <= 1e-12 * a.magnitude.maxCoeff());
      if (a.mask(k, c)) CHECK(std::abs(a.phase(k, c) - b.phase(k, c)) < 1e-12);
    }
}

TEST_CASE("linearization error scales with the square of the shear") {
  // For a cubic input phase b o^3, delta_phi / shear - dphi/do = b shear^2 / 4.
  const double b = 3e-33;
  double err[2];
  for (int i = 0; i < 2; ++i) {
    const double shear_hz = kShearHz * (i + 1);
    const auto in = half_shear_grid(1556.0, kShearHz, 321);
    const auto out = FrequencyGrid(in.center() * 1.6, in.spacing() * 2, 161, "out");
    const auto g = ridge_kernel(in, out, 40 * in.spacing(), [=](double o) { return b * o * o * o; });
    const double shear = units::hz_to_omega(shear_hz);
    std::vector<double> centers;
    for (std::size_t j = 140; j <= 180; j += 2) centers.push_back(snap_probe(in, in.omega(j), shear).center);
    std::vector<double> delays;
    for (int n = 0; n < 64; ++n) delays.push_back(n * 1e12 / shear_hz / 16);
    const auto pd = phase_differences(extract_sideband(sweep(g, centers, delays, 2 * i * in.spacing() + 2 * in.spacing())));
    double worst = 0.0;
    for (Eigen::Index k = 0; k < pd.mask.rows(); ++k)
      for (Eigen::Index c = 0; c < pd.mask.cols(); ++c)
        if (pd.mask(k, c)) {
          const double o = centers[c] - in.center();
          worst = std::max(worst, std::abs(pd.delta_phi(k, c) / pd.shear - 3 * b * o * o));
        }
    err[i] = worst;
  }
  CHECK(err[1] / err[0] == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("magnitude estimates") {
  Fixture f;
  const auto centers = dense_centers(f.in, 30, 130, 2);
  const auto g = ridge_kernel(f.in, f.out, f.ridge);
  const auto sb = extract_sideband(sweep(g, centers, delays_0_to_4ns(), f.shear));
  const auto pd = phase_differences(sb);
  const auto dc_half = integrate_phase(pd, sb, MagnitudeMode::kDcHalf);
  const auto split = integrate_phase(pd, sb, MagnitudeMode::kQuadraticSplit);
  double worst_dc = 0.0, worst_split = 0.0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const std::size_t j = f.in.nearest_index(centers[c]);
    for (std::size_t k = 0; k < f.out.count(); ++k) {
      const double truth = std::abs(g.values()(k, j));
      if (truth < 0.3 * g.values().cwiseAbs().maxCoeff()) continue;
      worst_dc = std::max(worst_dc, std::abs(dc_half.magnitude(k, c) / truth - 1));
      worst_split = std::max(worst_split, std::abs(split.magnitude(k, c) / truth - 1));
    }
  }
  // Second-order in shear / ridge width, which is (2/25)^2 here.
  CHECK(worst_dc < 0.01);
  CHECK(worst_split < 0.01);
}

TEST_CASE("delay spectrum puts the beat at plus shear") {
  Fixture f;
  const auto g = ridge_kernel(f.in, f.out, f.ridge, [](double o) { return 0.9e-9 * o; });
  std::vector<double> delays;
  // Exactly eight beat periods, so the beat falls on a transform bin well
  // clear of the dc lobe.
  for (int n = 0; n < 128; ++n) delays.push_back(n * 8e12 / kShearHz / 128);
  const auto ds = sweep(g, dense_centers(f.in, 80, 80, 1), delays, f.shear);
  const auto spec = delay_spectrum(ds, 0, 8);
  const std::size_t k = f.out.nearest_index(f.in.omega(80) + (f.out.center() - f.in.center()));
  std::size_t best = 0;
  double best_val = 0.0;
  for (std::size_t q = 0; q < spec.frequencies.size(); ++q)
    if (spec.frequencies[q] > 0.5 * f.shear && std::abs(spec.values(k, q)) > best_val) {
      best_val = std::abs(spec.values(k, q));
      best = q;
    }
  const double bin = spec.frequencies[1] - spec.frequencies[0];
  CHECK(std::abs(spec.frequencies[best] - f.shear) < 1e-6 * bin);
}

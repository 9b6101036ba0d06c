#include <algorithm>
#include <cmath>

#include "qfc/core/errors.hpp"
#include "qfc/core/parallel.hpp"
#include "qfc/core/rng.hpp"
#include "qfc/measure/dataset.hpp"
#include "qfc/measure/probe.hpp"

namespace qfc {
namespace {

// Stream identifiers for the two noise sources.
constexpr std::uint64_t kAdditiveStream = 1;
constexpr std::uint64_t kJitterStream = 2;

}  // namespace

DelaySweepDataset synthesize_sweep(const GreensFunction& g, const SweepRequest& req) {
  if (req.averages < 1) throw PreconditionError("synthesize_sweep: averages must be at least 1");
  if (!(req.osa_fwhm_nm >= 0.0)) throw PreconditionError("synthesize_sweep: OSA resolution must be non-negative");
  if (!(req.noise.additive_sigma >= 0.0) || !(req.noise.multiplicative_sigma >= 0.0))
    throw PreconditionError("synthesize_sweep: noise sigmas must be non-negative");
  if (req.centers.empty() || req.delays_ps.empty())
    throw PreconditionError("synthesize_sweep: need at least one center and one delay");

  const std::size_t nc = req.centers.size(), nk = g.out_grid().count(), nd = req.delays_ps.size();
  for (double c : req.centers) tone_indices(g.in_grid(), TwoToneProbe{c, req.shear, 0.0, req.amplitude});

  const bool osa = req.osa_fwhm_nm > 0.0;
  const Eigen::MatrixXd kernel = osa ? osa_kernel(g.out_grid(), req.osa_fwhm_nm) : Eigen::MatrixXd();

  // Noiseless spectra, laid out [center][out][delay].
  std::vector<double> clean(nc * nk * nd);
  parallel_for(nc * nd, req.threads, [&](std::size_t cell) {
    const std::size_t c = cell / nd, d = cell % nd;
    Eigen::VectorXd spec = output_intensity(g, TwoToneProbe{req.centers[c], req.shear, req.delays_ps[d], req.amplitude});
    if (osa) spec = kernel * spec;
    for (std::size_t k = 0; k < nk; ++k) clean[(c * nk + k) * nd + d] = spec[k];
  });

  SweepMetadata meta;
  meta.shear = req.shear;
  meta.averages = req.averages;
  meta.seed = req.noise.seed;
  meta.osa_fwhm_nm = req.osa_fwhm_nm;
  meta.amplitude = req.amplitude;
  meta.noise = req.noise;
  if (req.noise.is_zero()) {
    for (double& v : clean) v = std::max(v, 0.0);
    return DelaySweepDataset(g.out_grid(), req.centers, req.delays_ps, std::move(clean), std::move(meta));
  }

  const double peak = *std::max_element(clean.begin(), clean.end());
  const double add_sigma = req.noise.additive_sigma * peak;
  const std::uint64_t seed = req.noise.seed;
  std::vector<double> noisy(clean.size());
  parallel_for(nc * nd, req.threads, [&](std::size_t cell) {
    const std::size_t c = cell / nd, d = cell % nd;
    for (std::size_t k = 0; k < nk; ++k) {
      const double base = clean[(c * nk + k) * nd + d];
      double acc = 0.0;
      for (std::size_t a = 0; a < req.averages; ++a) {
        const double jitter = 1.0 + req.noise.multiplicative_sigma *
                                        counter_normal(counter_key(seed, {kJitterStream, c, d, a}));
        const double additive = add_sigma * counter_normal(counter_key(seed, {kAdditiveStream, c, k, d, a}));
        acc += base * jitter + additive;
      }
      noisy[(c * nk + k) * nd + d] = std::max(acc / static_cast<double>(req.averages), 0.0);
    }
  });
  return DelaySweepDataset(g.out_grid(), req.centers, req.delays_ps, std::move(noisy), std::move(meta));
}

}  // namespace qfc

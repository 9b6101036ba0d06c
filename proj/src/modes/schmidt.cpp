#include "qfc/modes/schmidt.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <numbers>

#include "qfc/core/errors.hpp"
#include "qfc/core/fft.hpp"

namespace qfc {
namespace {

SchmidtDecomposition decompose(const GreensFunction& g, const Eigen::MatrixXcd& u, std::optional<std::size_t> rank) {
  if (!u.allFinite()) throw PreconditionError("schmidt: Green's function has non-finite entries");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(u, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index full = svd.singularValues().size();
  const Eigen::Index n = rank ? std::min<Eigen::Index>(full, static_cast<Eigen::Index>(*rank)) : full;
  const double s_in = std::sqrt(g.in_grid().spacing()), s_out = std::sqrt(g.out_grid().spacing());

  SchmidtDecomposition d;
  d.singular_values = svd.singularValues().head(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXcd v = svd.matrixV().col(i);
    Eigen::VectorXcd w = svd.matrixU().col(i);
    Eigen::Index arg_max = 0;
    v.cwiseAbs().maxCoeff(&arg_max);
    const cplx rot = std::abs(v[arg_max]) > 0.0 ? std::conj(v[arg_max]) / std::abs(v[arg_max]) : cplx(1.0);
    d.input_modes.emplace_back(g.in_grid(), v * rot / s_in);
    d.output_modes.emplace_back(g.out_grid(), w * rot / s_out);
  }
  const double s2 = svd.singularValues().squaredNorm();
  const double s4 = svd.singularValues().array().pow(4).sum();
  d.schmidt_number = s4 > 0.0 ? s2 * s2 / s4 : 0.0;
  return d;
}

}  // namespace

GreensFunction SchmidtDecomposition::reconstruct() const {
  if (input_modes.empty()) throw PreconditionError("SchmidtDecomposition: no modes to rebuild from");
  const auto& in = input_modes.front().grid();
  const auto& out = output_modes.front().grid();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(out.count(), in.count());
  for (std::size_t i = 0; i < input_modes.size(); ++i)
    m += singular_values[i] * output_modes[i].amplitude() * input_modes[i].amplitude().adjoint();
  return GreensFunction(out, in, std::move(m));
}

SchmidtDecomposition schmidt(const GreensFunction& g, std::optional<std::size_t> rank) {
  return decompose(g, g.unitary_form(), rank);
}

SchmidtDecomposition schmidt_band_limited(const GreensFunction& g, const FrequencyBand& band,
                                          std::optional<std::size_t> rank) {
  Eigen::MatrixXcd u = g.unitary_form();
  for (std::size_t k = 0; k < g.out_grid().count(); ++k)
    if (!band.contains(g.out_grid().omega(k))) u.row(k).setZero();
  return decompose(g, u, rank);
}

TimeSeries time_domain_mode(const SpectralMode& f, std::size_t samples) {
  if (!f.is_normalized()) throw PreconditionError("time_domain_mode: mode is not normalized");
  const std::size_t n = f.grid().count();
  if (samples < n) throw PreconditionError("time_domain_mode: need at least as many samples as grid points");
  const double delta = f.grid().spacing();
  const double m = static_cast<double>(samples);
  const double dt = 2.0 * std::numbers::pi / (m * delta);
  const double c = 0.5 * static_cast<double>(n - 1);

  // exp(-i (k - c)(q - M/2) 2 pi / M) splits into a transform over k and
  // phase factors on either side.
  std::vector<cplx> buf(samples, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) buf[k] = f.amplitude()[k] * (k % 2 == 0 ? 1.0 : -1.0);
  FftPlan(samples).forward(buf);

  TimeSeries ts;
  ts.dt = dt;
  ts.t_s.resize(samples);
  ts.values.resize(samples);
  const double scale = delta / std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t q = 0; q < samples; ++q) {
    const double qq = static_cast<double>(q);
    ts.t_s[q] = (qq - 0.5 * m) * dt;
    const double phase = 2.0 * std::numbers::pi * c * qq / m - std::numbers::pi * c;
    ts.values[q] = buf[q] * std::polar(scale, phase);
  }
  return ts;
}

double full_width_half_max(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw DimensionError("full_width_half_max: bad profile");
  const double half = 0.5 * *std::max_element(y.begin(), y.end());
  if (!(half > 0.0)) return 0.0;
  std::size_t lo = 0, hi = y.size() - 1;
  while (y[lo] < half) ++lo;
  while (y[hi] < half) --hi;
  const auto cross = [&](std::size_t inside, std::size_t outside) {
    const double f = (half - y[outside]) / (y[inside] - y[outside]);
    return x[outside] + f * (x[inside] - x[outside]);
  };
  const double left = lo > 0 ? cross(lo, lo - 1) : x[0];
  const double right = hi + 1 < y.size() ? cross(hi, hi + 1) : x.back();
  return right - left;
}

double intensity_fwhm(const TimeSeries& ts) {
  std::vector<double> p(ts.values.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(ts.values[i]);
  return full_width_half_max(ts.t_s, p);
}

}  // namespace qfc

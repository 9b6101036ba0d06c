#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qfc/core/errors.hpp"
#include "qfc/core/fft.hpp"
#include "qfc/core/parallel.hpp"
#include "qfc/core/units.hpp"
#include "qfc/simd/kernels.hpp"
#include "qfc/sim/converter.hpp"
#include "sim_common.hpp"

namespace qfc {
namespace {

constexpr double kUnitarityLimit = 1e-5;

// Everything about a section that does not depend on the launched field.
// The bands are propagated on grids padded by half their size on each side,
// so converted light that leaves the requested grids is dropped on cropping
// instead of wrapping around to the opposite edge.
class Propagator {
 public:
  Propagator(const BsfwmSpec& spec, const FrequencyGrid& in, const FrequencyGrid& out, double dz)
      : n_(in.count()), pad_((in.count() + 1) / 2), m_(in.count() + 2 * pad_), fft_(m_) {
    detail::check_spec(spec, in, out);
    if (out.count() != n_ || std::abs(out.spacing() - in.spacing()) > 1e-12 * in.spacing())
      throw PreconditionError("split_step: input and output grids must share spacing and count");
    const double length = spec.active_length_m;
    if (length > 0.0 && !(dz > 0.0 && dz <= length / 100.0))
      throw PreconditionError("split_step: step must satisfy 0 < dz <= L/100");

    const double delta = in.spacing();
    const double det = (in.center() + spec.shift) - out.center();
    const double m = det / delta;
    if (std::abs(m - std::round(m)) > 1e-6)
      throw PreconditionError("split_step: pump detuning from the output grid center must be a whole number of grid cells");

    steps_ = length > 0.0 ? static_cast<std::size_t>(std::ceil(length / dz - 1e-9)) : 0;
    const double h = steps_ > 0 ? length / static_cast<double>(steps_) : 0.0;

    const FrequencyGrid in_pad(in.center(), delta, m_), out_pad(out.center(), delta, m_);
    const auto ka = detail::band_wavenumbers(in_pad, spec.walkoff_in, spec.band_dispersion_in, length);
    const auto kb = detail::band_wavenumbers(out_pad, spec.walkoff_out, spec.band_dispersion_out, length);
    const double wa = spec.walkoff_in * units::kPico, wb = spec.walkoff_out * units::kPico;
    half_a_.resize(m_);
    half_b_.resize(m_);
    full_a_.resize(m_);
    full_b_.resize(m_);
    frame_a_.resize(m_);
    frame_b_.resize(m_);
    for (std::size_t j = 0; j < m_; ++j) {
      half_a_[j] = std::polar(1.0, 0.5 * ka[j] * h);
      half_b_[j] = std::polar(1.0, 0.5 * kb[j] * h);
      full_a_[j] = half_a_[j] * half_a_[j];
      full_b_[j] = half_b_[j] * half_b_[j];
      frame_a_[j] = std::polar(1.0, -0.5 * in_pad.offset(j) * wa * length);
      frame_b_[j] = std::polar(1.0, -0.5 * out_pad.offset(j) * wb * length);
    }

    // Time samples of the periodic window, wrapped into [-T/2, T/2).
    const double dt = 2.0 * std::numbers::pi / (static_cast<double>(m_) * delta);
    std::vector<cplx> pump(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const double t = (i < (m_ + 1) / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(m_)) * dt;
      pump[i] = pump_product(spec.pump_p, spec.pump_q, t) * std::polar(1.0, -det * t);
    }
    cos_.resize(steps_ * m_);
    usin_.resize(steps_ * m_);
    for (std::size_t s = 0; s < steps_; ++s) {
      const double scale = spec.coupling * coupling_at(spec, (static_cast<double>(s) + 0.5) * h) * h;
      for (std::size_t i = 0; i < m_; ++i) {
        const double theta = scale * std::abs(pump[i]);
        cos_[s * m_ + i] = std::cos(theta);
        usin_[s * m_ + i] = cplx(0.0, std::sin(theta)) * std::polar(1.0, -std::arg(pump[i]));
      }
    }
  }

  std::size_t size() const { return n_; }

  // a and b hold the requested grids on entry and on return.
  void run(std::vector<cplx>& a, std::vector<cplx>& b, const StepObserver& observer) const {
    std::vector<cplx> pa(m_, cplx(0.0, 0.0)), pb(m_, cplx(0.0, 0.0));
    std::copy(a.begin(), a.end(), pa.begin() + pad_);
    std::copy(b.begin(), b.end(), pb.begin() + pad_);
    simd::cmul(pa, frame_a_);
    simd::cmul(pb, frame_b_);
    if (steps_ > 0) {
      simd::cmul(pa, half_a_);
      simd::cmul(pb, half_b_);
    }
    const double scale = 1.0 / static_cast<double>(m_);
    std::vector<cplx> ta(m_), tb(m_);
    const std::size_t half = m_ / 2;
    for (std::size_t s = 0; s < steps_; ++s) {
      // Spectral index k carries mode number k - floor(M/2).
      for (std::size_t k = 0; k < m_; ++k) {
        const std::size_t slot = (k + m_ - half) % m_;
        ta[slot] = pa[k];
        tb[slot] = pb[k];
      }
      fft_.forward(ta);
      fft_.forward(tb);
      const std::span<const double> c(cos_.data() + s * m_, m_);
      const std::span<const cplx> u(usin_.data() + s * m_, m_);
      simd::rotate_pairs(ta, tb, c, u);
      fft_.backward(ta);
      fft_.backward(tb);
      for (std::size_t k = 0; k < m_; ++k) {
        const std::size_t slot = (k + m_ - half) % m_;
        pa[k] = ta[slot] * scale;
        pb[k] = tb[slot] * scale;
      }
      const bool last = s + 1 == steps_;
      simd::cmul(pa, last ? half_a_ : full_a_);
      simd::cmul(pb, last ? half_b_ : full_b_);
      if (observer) report(s, pa, pb, last, observer);
    }
    simd::cmul(pa, frame_a_);
    simd::cmul(pb, frame_b_);
    std::copy_n(pa.begin() + pad_, n_, a.begin());
    std::copy_n(pb.begin() + pad_, n_, b.begin());
  }

 private:
  // State at the end of step s in the lab frame.
  void report(std::size_t s, const std::vector<cplx>& a, const std::vector<cplx>& b, bool last,
              const StepObserver& observer) const {
    BandState st{Eigen::VectorXcd(n_), Eigen::VectorXcd(n_)};
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t i = k + pad_;
      st.a[k] = last ? a[i] : a[i] * std::conj(half_a_[i]);
      st.b[k] = last ? b[i] : b[i] * std::conj(half_b_[i]);
    }
    observer(s, st);
  }

  std::size_t n_;
  std::size_t pad_;
  std::size_t m_;
  std::size_t steps_ = 0;
  FftPlan fft_;
  std::vector<cplx> half_a_, half_b_, full_a_, full_b_, frame_a_, frame_b_;
  std::vector<double> cos_;
  std::vector<cplx> usin_;
};

}  // namespace

BandState split_step_propagate(const BsfwmSpec& spec, const FrequencyGrid& in_grid,
                               const FrequencyGrid& out_grid, double dz_m, BandState initial,
                               const StepObserver& observer) {
  const Propagator prop(spec, in_grid, out_grid, dz_m);
  const std::size_t n = prop.size();
  if (static_cast<std::size_t>(initial.a.size()) != n || static_cast<std::size_t>(initial.b.size()) != n)
    throw DimensionError("split_step_propagate: band spectra must match the grid size");
  std::vector<cplx> a(initial.a.data(), initial.a.data() + n), b(initial.b.data(), initial.b.data() + n);
  prop.run(a, b, observer);
  return {Eigen::Map<Eigen::VectorXcd>(a.data(), n), Eigen::Map<Eigen::VectorXcd>(b.data(), n)};
}

ConverterGreens split_step_greens(const BsfwmSpec& spec, const FrequencyGrid& in_grid,
                                  const FrequencyGrid& out_grid, double dz_m, const SimOptions& opts) {
  const Propagator prop(spec, in_grid, out_grid, dz_m);
  const std::size_t n = prop.size();
  const double inv = 1.0 / in_grid.spacing();
  Eigen::MatrixXcd conv(n, n), thru(n, n);
  parallel_for(n, opts.threads, [&](std::size_t j) {
    std::vector<cplx> a(n, cplx(0.0, 0.0)), b(n, cplx(0.0, 0.0));
    a[j] = 1.0;
    prop.run(a, b, {});
    for (std::size_t k = 0; k < n; ++k) {
      conv(k, j) = b[k] * inv;
      thru(k, j) = a[k] * inv;
    }
  });
  ConverterGreens out{GreensFunction(out_grid, in_grid, std::move(conv)),
                      GreensFunction(in_grid, in_grid, std::move(thru))};
  const double defect = out.unitarity_defect();
  if (!(defect <= kUnitarityLimit))
    throw NumericalError("split_step_greens: unitarity defect " + std::to_string(defect) + " exceeds 1e-5");
  if (!opts.include_through) out.through.reset();
  return out;
}

}  // namespace qfc

#include "qfc/core/greens.hpp"

#include <cmath>

#include "qfc/core/errors.hpp"
#include "qfc/simd/kernels.hpp"

namespace qfc {

SpectralMode::SpectralMode(FrequencyGrid grid, Eigen::VectorXcd amplitude)
    : grid_(std::move(grid)), amplitude_(std::move(amplitude)) {
  if (static_cast<std::size_t>(amplitude_.size()) != grid_.count())
    throw DimensionError("SpectralMode: amplitude length does not match grid");
}

SpectralMode SpectralMode::gaussian(const FrequencyGrid& grid, double center, double fwhm,
                                    const std::function<double(double)>& phase) {
  if (!(fwhm > 0.0)) throw PreconditionError("SpectralMode::gaussian: fwhm must be positive");
  // |f|^2 has the requested FWHM, so the amplitude decays as exp(-2 ln2 x^2 / fwhm^2).
  const double a = 2.0 * std::log(2.0) / (fwhm * fwhm);
  Eigen::VectorXcd amp(grid.count());
  for (std::size_t k = 0; k < grid.count(); ++k) {
    const double x = grid.omega(k) - center;
    const double ph = phase ? phase(x) : 0.0;
    amp[k] = std::polar(std::exp(-a * x * x), ph);
  }
  return SpectralMode(grid, std::move(amp)).normalized();
}

double SpectralMode::norm2() const {
  return simd::sum_abs2({amplitude_.data(), static_cast<std::size_t>(amplitude_.size())}) *
         grid_.spacing();
}

SpectralMode SpectralMode::normalized() const {
  const double n = norm2();
  if (!(n > 0.0)) throw PreconditionError("SpectralMode: cannot normalize a zero mode");
  return SpectralMode(grid_, amplitude_ / std::sqrt(n));
}

bool SpectralMode::is_normalized(double tol) const { return std::abs(norm2() - 1.0) <= tol; }

GreensFunction::GreensFunction(FrequencyGrid out_grid, FrequencyGrid in_grid, Eigen::MatrixXcd values)
    : out_grid_(std::move(out_grid)), in_grid_(std::move(in_grid)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.rows()) != out_grid_.count() ||
      static_cast<std::size_t>(values_.cols()) != in_grid_.count())
    throw DimensionError("GreensFunction: matrix dimensions do not match grids");
  if (!values_.allFinite()) throw NumericalError("GreensFunction: non-finite entries");
}

GreensFunction GreensFunction::zeros(FrequencyGrid out_grid, FrequencyGrid in_grid) {
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(out_grid.count(), in_grid.count());
  return GreensFunction(std::move(out_grid), std::move(in_grid), std::move(v));
}

GreensFunction GreensFunction::identity(const FrequencyGrid& grid) {
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(grid.count(), grid.count()) / grid.spacing();
  return GreensFunction(grid, grid, std::move(v));
}

GreensFunction GreensFunction::pure_delay(const FrequencyGrid& grid, double delay_s) {
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(grid.count(), grid.count());
  for (std::size_t k = 0; k < grid.count(); ++k)
    v(k, k) = std::polar(1.0 / grid.spacing(), grid.offset(k) * delay_s);
  return GreensFunction(grid, grid, std::move(v));
}

Eigen::MatrixXcd GreensFunction::unitary_form() const {
  return values_ * std::sqrt(out_grid_.spacing() * in_grid_.spacing());
}

GreensFunction GreensFunction::with_output_phase(std::span<const double> chi) const {
  if (chi.size() != out_grid_.count()) throw DimensionError("with_output_phase: length mismatch");
  Eigen::MatrixXcd v = values_;
  for (Eigen::Index k = 0; k < v.rows(); ++k) v.row(k) *= std::polar(1.0, chi[k]);
  return GreensFunction(out_grid_, in_grid_, std::move(v));
}

GreensFunction GreensFunction::with_input_phase(std::span<const double> phi) const {
  if (phi.size() != in_grid_.count()) throw DimensionError("with_input_phase: length mismatch");
  Eigen::MatrixXcd v = values_;
  for (Eigen::Index j = 0; j < v.cols(); ++j) v.col(j) *= std::polar(1.0, phi[j]);
  return GreensFunction(out_grid_, in_grid_, std::move(v));
}

FrequencyBand full_band(const FrequencyGrid& grid) {
  return {grid.first() - 0.5 * grid.spacing(), grid.last() + 0.5 * grid.spacing()};
}

SpectralMode apply(const GreensFunction& g, const SpectralMode& f) {
  if (f.grid() != g.in_grid()) throw DimensionError("apply: mode grid does not match the input grid");
  const auto& m = g.values();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(m.rows());
  const double dw = g.in_grid().spacing();
  std::span<cplx> y(out.data(), static_cast<std::size_t>(out.size()));
  // Column-major storage: accumulate column by column in index order.
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const cplx alpha = f.amplitude()[j] * dw;
    if (alpha == cplx(0.0)) continue;
    simd::caxpy(alpha, {m.col(j).data(), static_cast<std::size_t>(m.rows())}, y);
  }
  return SpectralMode(g.out_grid(), std::move(out));
}

double conversion_efficiency(const GreensFunction& g, const SpectralMode& f, const FrequencyBand& band) {
  if (!f.is_normalized()) throw PreconditionError("conversion_efficiency: input mode is not normalized");
  if (band.empty()) return 0.0;
  const FrequencyBand span = full_band(g.out_grid());
  if (band.lo < span.lo || band.hi > span.hi)
    throw PreconditionError("conversion_efficiency: band extends beyond the output grid");
  const SpectralMode out = apply(g, f);
  const auto& grid = g.out_grid();
  std::size_t lo = grid.count(), hi = 0;
  for (std::size_t k = 0; k < grid.count(); ++k) {
    if (band.contains(grid.omega(k))) {
      lo = std::min(lo, k);
      hi = k + 1;
    }
  }
  if (lo >= hi) return 0.0;
  return simd::sum_abs2({out.amplitude().data() + lo, hi - lo}) * grid.spacing();
}

double unitarity_defect(std::span<const GreensFunction* const> blocks) {
  if (blocks.empty()) throw PreconditionError("unitarity_defect: no blocks");
  const auto& in = blocks.front()->in_grid();
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(in.count(), in.count());
  for (const auto* b : blocks) {
    if (b->in_grid() != in) throw DimensionError("unitarity_defect: blocks use different input grids");
    const Eigen::MatrixXcd u = b->unitary_form();
    gram.noalias() += u.adjoint() * u;
  }
  gram -= Eigen::MatrixXcd::Identity(in.count(), in.count());
  return gram.cwiseAbs().maxCoeff();
}

}  // namespace qfc

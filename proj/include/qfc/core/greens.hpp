#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "qfc/core/grid.hpp"

namespace qfc {

using cplx = std::complex<double>;

// Complex spectral amplitude f(omega) on a grid, units (rad/s)^(-1/2):
// sum |f_k|^2 * spacing = 1 when normalized.
class SpectralMode {
 public:
  SpectralMode(FrequencyGrid grid, Eigen::VectorXcd amplitude);

  // Intensity-FWHM Gaussian centred at `center` (rad/s), multiplied by exp(i*phase(omega - center)).
  static SpectralMode gaussian(const FrequencyGrid& grid, double center, double fwhm,
                               const std::function<double(double)>& phase = {});

  const FrequencyGrid& grid() const { return grid_; }
  const Eigen::VectorXcd& amplitude() const { return amplitude_; }

  double norm2() const;  // sum |f|^2 * spacing
  SpectralMode normalized() const;
  bool is_normalized(double tol = 1e-9) const;

 private:
  FrequencyGrid grid_;
  Eigen::VectorXcd amplitude_;
};

// Discrete Green's function G(omega_out, omega_in), stored as an amplitude
// density: the output of input f is out_k = sum_j G[k,j] f_j * in_spacing.
class GreensFunction {
 public:
  GreensFunction(FrequencyGrid out_grid, FrequencyGrid in_grid, Eigen::MatrixXcd values);

  static GreensFunction zeros(FrequencyGrid out_grid, FrequencyGrid in_grid);
  // values = I / spacing on a single grid.
  static GreensFunction identity(const FrequencyGrid& grid);
  // values = diag(exp(i * omega_rel * delay)) / spacing; omega_rel measured from the grid center.
  static GreensFunction pure_delay(const FrequencyGrid& grid, double delay_s);

  const FrequencyGrid& out_grid() const { return out_grid_; }
  const FrequencyGrid& in_grid() const { return in_grid_; }
  const Eigen::MatrixXcd& values() const { return values_; }

  // Dimensionless discrete operator sqrt(d_out d_in) * G.
  Eigen::MatrixXcd unitary_form() const;

  // Multiply rows by exp(i chi_k) (output-frequency gauge) or columns by exp(i phi_j).
  GreensFunction with_output_phase(std::span<const double> chi) const;
  GreensFunction with_input_phase(std::span<const double> phi) const;

 private:
  FrequencyGrid out_grid_;
  FrequencyGrid in_grid_;
  Eigen::MatrixXcd values_;
};

struct FrequencyBand {
  double lo;  // rad/s
  double hi;
  bool empty() const { return !(hi >= lo); }
  bool contains(double omega) const { return omega >= lo && omega <= hi; }
};

// Full span of a grid including half a cell on each side.
FrequencyBand full_band(const FrequencyGrid& grid);

SpectralMode apply(const GreensFunction& g, const SpectralMode& f);

// Fraction of a normalized input mode that ends up inside `band` of the output grid.
double conversion_efficiency(const GreensFunction& g, const SpectralMode& f, const FrequencyBand& band);

// max |U^dagger U - I| where U stacks sqrt(d_out d_in) * G over all blocks.
// Blocks must share the same input grid.
double unitarity_defect(std::span<const GreensFunction* const> blocks);

}  // namespace qfc

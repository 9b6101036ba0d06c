#include "qfc/core/grid.hpp"

#include <algorithm>
#include <cmath>

#include "qfc/core/errors.hpp"
#include "qfc/core/units.hpp"

namespace qfc {

FrequencyGrid::FrequencyGrid(double center_omega, double spacing, std::size_t count,
                             std::string label)
    : center_(center_omega), spacing_(spacing), count_(count), label_(std::move(label)) {
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw PreconditionError("FrequencyGrid: spacing must be positive");
  if (count < 2) throw PreconditionError("FrequencyGrid: count must be at least 2");
  if (!(center_omega > 0.0) || !std::isfinite(center_omega))
    throw PreconditionError("FrequencyGrid: center must be a positive angular frequency");
  if (first() <= 0.0) throw PreconditionError("FrequencyGrid: grid extends to non-positive frequency");
}

FrequencyGrid FrequencyGrid::from_wavelength(double center_nm, double spacing, std::size_t count,
                                             std::string label) {
  return FrequencyGrid(units::wavelength_nm_to_omega(center_nm), spacing, count, std::move(label));
}

double FrequencyGrid::offset(std::size_t k) const {
  return (static_cast<double>(k) - 0.5 * static_cast<double>(count_ - 1)) * spacing_;
}

double FrequencyGrid::wavelength_nm(std::size_t k) const {
  return units::omega_to_wavelength_nm(omega(k));
}

std::vector<double> FrequencyGrid::omegas() const {
  std::vector<double> w(count_);
  for (std::size_t k = 0; k < count_; ++k) w[k] = omega(k);
  return w;
}

std::vector<double> FrequencyGrid::wavelengths_nm() const {
  std::vector<double> w(count_);
  for (std::size_t k = 0; k < count_; ++k) w[k] = wavelength_nm(k);
  return w;
}

double FrequencyGrid::fractional_index(double omega) const {
  return (omega - center_) / spacing_ + 0.5 * static_cast<double>(count_ - 1);
}

std::size_t FrequencyGrid::nearest_index(double omega) const {
  const double idx = std::round(fractional_index(omega));
  if (idx <= 0.0) return 0;
  return std::min(count_ - 1, static_cast<std::size_t>(idx));
}

bool FrequencyGrid::contains(double omega) const {
  const double half = 0.5 * spacing_;
  return omega >= first() - half && omega <= last() + half;
}

bool FrequencyGrid::operator==(const FrequencyGrid& other) const {
  return center_ == other.center_ && spacing_ == other.spacing_ && count_ == other.count_;
}

}  // namespace qfc

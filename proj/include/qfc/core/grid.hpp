#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qfc {

// Uniform discretization of an optical band in angular frequency.
// Point k sits at center + (k - (count-1)/2) * spacing.
class FrequencyGrid {
 public:
  FrequencyGrid(double center_omega, double spacing, std::size_t count, std::string label = {});

  // Grid centred on a wavelength (nm) with the given angular spacing.
  static FrequencyGrid from_wavelength(double center_nm, double spacing, std::size_t count,
                                       std::string label = {});

  double center() const { return center_; }
  double spacing() const { return spacing_; }
  std::size_t count() const { return count_; }
  const std::string& label() const { return label_; }

  double offset(std::size_t k) const;  // omega_k - center
  double omega(std::size_t k) const { return center_ + offset(k); }
  double wavelength_nm(std::size_t k) const;
  double first() const { return omega(0); }
  double last() const { return omega(count_ - 1); }

  std::vector<double> omegas() const;
  std::vector<double> wavelengths_nm() const;

  // Index of the nearest grid point, clamped to the grid.
  std::size_t nearest_index(double omega) const;
  // Fractional index (may be outside [0, count-1]).
  double fractional_index(double omega) const;
  bool contains(double omega) const;

  // Same lattice: equal spacing, count and center (bitwise).
  bool operator==(const FrequencyGrid& other) const;
  bool operator!=(const FrequencyGrid& other) const { return !(*this == other); }

 private:
  double center_;
  double spacing_;
  std::size_t count_;
  std::string label_;
};

}  // namespace qfc

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qfc/recon/sideband.hpp"

namespace qfc::detail {

// Least-squares projector onto {1, cos(shear tau), sin(shear tau)} for the
// samples [first, first + count) of a delay grid.
class BeatFit {
 public:
  BeatFit(const std::vector<double>& delays_ps, std::size_t first, std::size_t count, double shear);
  // (c0, c1, c2) for trace[first .. first + count).
  Eigen::Vector3d fit(const double* trace) const;

 private:
  std::size_t first_;
  std::size_t count_;
  Eigen::Matrix<double, 3, Eigen::Dynamic> pinv_;
};

double beat_period_ps(double shear);

// Share of the delay-dependent power reproduced by the beat model, pooled
// over every trace of the dataset.
double explained_fraction(const DelaySweepDataset& data, const BeatFit& fit, std::size_t first,
                          std::size_t count, double shear);

}  // namespace qfc::detail

#pragma once

#include <algorithm>
#include <cmath>

#include "downwash/models.hpp"

namespace downwash::testing {

/// Scale below which a gradient entry is compared absolutely rather than
/// relatively. Central differences at h = 1e-6 on an O(1) loss carry about
/// 1e-10 of rounding error, so smaller entries are judged to 1e-9 absolute.
inline constexpr double kGradientFloor = 1e-4;

/// Max over parameters of |analytic - central FD| / max(|analytic|, |FD|, floor).
inline double max_relative_gradient_error(const learning::ForceModel& model, const learning::PreparedBatch& batch,
                                          double h = 1e-6) {
  Eigen::VectorXd grad;
  model.loss_and_gradient(batch, &grad);
  const Eigen::VectorXd theta = model.net().flatten();
  learning::ForceModel probe = model;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd t = theta;
    t(i) = theta(i) + h;
    probe.net().unflatten(t);
    const double up = probe.loss_and_gradient(batch, nullptr);
    t(i) = theta(i) - h;
    probe.net().unflatten(t);
    const double down = probe.loss_and_gradient(batch, nullptr);
    const double fd = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(fd), std::abs(grad(i)), kGradientFloor});
    worst = std::max(worst, std::abs(fd - grad(i)) / scale);
  }
  return worst;
}

}  // namespace downwash::testing

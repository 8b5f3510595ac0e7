#pragma once

#include <random>

#include "downwash/geometry.hpp"

namespace downwash::testing {

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline Vec3 random_vec(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

inline geometry::InteractionState random_state(std::mt19937_64& rng) {
  return {random_vec(rng, 2.0), random_vec(rng, 1.0), random_vec(rng, 1.0)};
}

inline double random_angle(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(-10.0, 10.0)(rng);
}

}  // namespace downwash::testing

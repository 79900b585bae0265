#pragma once

#include <stdexcept>

#include "swabsim/types.hpp"

namespace swabsim {

/// First-order low-pass of the force signal, df/dt = -alpha f + alpha F.
/// Discretized with an exact zero-order hold so the response matches the
/// continuous exponential at any step size; each axis independent.
struct ForceFilter {
  Vec3 f = Vec3::Zero();
  double alpha = 1.0;  // 1/s

  explicit ForceFilter(double alpha_ = 1.0) : alpha(alpha_) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("force filter: alpha must be >= 0");
  }

  const Vec3& step(const Vec3& input, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("force filter: dt must be > 0");
    const double gain = 1.0 - std::exp(-alpha * dt);
    f += gain * (input - f);
    return f;
  }

  void reset(const Vec3& value = Vec3::Zero()) { f = value; }
};

}  // namespace swabsim

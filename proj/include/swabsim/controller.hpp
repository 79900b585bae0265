#pragma once

#include <stdexcept>

#include "swabsim/dynamics.hpp"
#include "swabsim/types.hpp"

namespace swabsim {

struct ControllerFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ControlMode { kForceFeedback, kBaseline };

/// Gains of the computed-torque admittance law. Baseline mode zeroes the
/// force path (Lambda = 0) and the caller holds the progression rate at 1.
struct ControllerGains {
  Vec7 kp = (Vec7() << 600, 600, 600, 600, 600, 600, 50).finished();
  Vec7 kd = (Vec7() << 30, 30, 30, 30, 30, 30, 5).finished();
  Vec3 lambda{450, 450, 45};
  ControlMode mode = ControlMode::kForceFeedback;
  Vec7 torque_limit = Vec7::Zero();  // component <= 0 disables saturation

  Vec3 effective_lambda() const {
    return mode == ControlMode::kBaseline ? Vec3::Zero() : lambda;
  }
  void validate() const {
    if ((kp.array() < 0).any() || (kd.array() < 0).any() || (lambda.array() < 0).any())
      throw std::invalid_argument("controller: gains must be >= 0");
  }
};

struct TorqueCommand {
  Vec7 tau = Vec7::Zero();
  bool saturated = false;
};

/// J^T diag(lambda) f for a sensor-frame force f.
Vec7 force_to_joint_torque(const KinematicChain& chain, const Vec7& q, const Vec3& lambda,
                           const Vec3& f);

/// Computed-torque law with feedforward acceleration, PD feedback and the
/// admittance force term:
///   tau = M (qdd_d + Kp (q_d - q) + Kd (qd_d - qd)) + C qd + g + J^T Lambda f
/// f is the filtered sensor-frame force estimate. Throws ControllerFault on
/// non-finite input.
TorqueCommand control_tick(const KinematicChain& chain, const ControllerGains& gains,
                           const Vec7& q, const Vec7& qd, const Vec7& q_d, const Vec7& qd_d,
                           const Vec7& qdd_d, const Vec3& f);

}  // namespace swabsim

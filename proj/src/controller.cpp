#include "swabsim/controller.hpp"

namespace swabsim {

Vec7 force_to_joint_torque(const KinematicChain& chain, const Vec7& q, const Vec3& lambda,
                           const Vec3& f) {
  return jacobian(chain, q).transpose() * (lambda.asDiagonal() * f);
}

TorqueCommand control_tick(const KinematicChain& chain, const ControllerGains& gains,
                           const Vec7& q, const Vec7& qd, const Vec7& q_d, const Vec7& qd_d,
                           const Vec7& qdd_d, const Vec3& f) {
  gains.validate();
  if (!q.allFinite() || !qd.allFinite() || !q_d.allFinite() || !qd_d.allFinite() ||
      !qdd_d.allFinite() || !f.allFinite())
    throw ControllerFault("controller: non-finite input");

  const LinkFrames frames = compute_frames(chain, q);
  const Vec7 accel_cmd =
      qdd_d + gains.kp.cwiseProduct(q_d - q) + gains.kd.cwiseProduct(qd_d - qd);

  TorqueCommand cmd;
  cmd.tau = mass_matrix(chain, frames) * accel_cmd + velocity_product_torque(chain, frames, qd) +
            gravity_vector(chain, frames);
  const Vec3 lambda = gains.effective_lambda();
  if (!lambda.isZero()) {
    const Mat37 j = frames.sensor.linear().transpose() * position_jacobian_world(chain, frames);
    cmd.tau += j.transpose() * (lambda.asDiagonal() * f);
  }

  for (int i = 0; i < 7; ++i) {
    const double lim = gains.torque_limit[i];
    if (lim > 0.0 && std::abs(cmd.tau[i]) > lim) {
      cmd.tau[i] = std::clamp(cmd.tau[i], -lim, lim);
      cmd.saturated = true;
    }
  }
  return cmd;
}

}  // namespace swabsim

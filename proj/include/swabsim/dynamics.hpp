#pragma once

#include <array>
#include <stdexcept>

#include "swabsim/chain.hpp"
#include "swabsim/types.hpp"

namespace swabsim {

struct DynamicsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// World-frame kinematic state of every joint frame plus link inertial
/// quantities, computed once per configuration and shared by the dynamics
/// routines below.
struct LinkFrames {
  std::array<Vec3, 7> joint_origin;  // p_i, a point on joint i's axis
  std::array<Vec3, 7> joint_axis;    // z_i, unit
  std::array<Mat3, 7> rotation;      // link frame i -> world
  std::array<Vec3, 7> com;           // link COM, world
  std::array<Mat3, 7> inertia_world; // about COM, world axes
  Iso3 sensor;                       // swab-mount/sensor frame
};

LinkFrames compute_frames(const KinematicChain& chain, const Vec7& q);

/// Pose of the sensor/swab-mount frame.
EePose forward_kinematics(const KinematicChain& chain, const Vec7& q);

/// 3x7 linear-velocity Jacobian of the sensor-frame origin, world frame.
Mat37 position_jacobian_world(const KinematicChain& chain, const LinkFrames& f);

/// 3x7 Jacobian expressed in the sensor frame, so that J^T f maps a
/// sensor-frame force f to joint torques.
Mat37 jacobian(const KinematicChain& chain, const Vec7& q);

/// 6x7 geometric Jacobian (linear on top, angular below), world frame.
Mat67 geometric_jacobian_world(const KinematicChain& chain, const LinkFrames& f);

/// Joint-space inertia matrix M(q) by the composite-rigid-body algorithm
/// in world-origin spatial coordinates. Symmetric positive definite.
Mat7 mass_matrix(const KinematicChain& chain, const Vec7& q);
Mat7 mass_matrix(const KinematicChain& chain, const LinkFrames& f);

/// All seven partial derivatives dM/dq_l, analytic.
std::array<Mat7, 7> mass_matrix_partials(const KinematicChain& chain, const LinkFrames& f);

/// Coriolis matrix from Christoffel symbols of the first kind, so that
/// dM/dt - 2C is skew-symmetric.
Mat7 coriolis_matrix(const KinematicChain& chain, const Vec7& q, const Vec7& qd);

/// Velocity-product torque h(q, qd) = C(q, qd) qd, by a world-frame
/// Newton-Euler recursion with zero acceleration and zero gravity. Agrees
/// with coriolis_matrix(q, qd) * qd to rounding error and is much cheaper.
Vec7 velocity_product_torque(const KinematicChain& chain, const LinkFrames& f, const Vec7& qd);

/// Gravity torque g(q), the gradient of potential energy with respect to q.
Vec7 gravity_vector(const KinematicChain& chain, const Vec7& q);
Vec7 gravity_vector(const KinematicChain& chain, const LinkFrames& f);

/// Total potential energy U(q) = -sum_k m_k g . c_k (world).
double potential_energy(const KinematicChain& chain, const LinkFrames& f);

/// Kinetic energy via the mass matrix.
double kinetic_energy(const KinematicChain& chain, const Vec7& q, const Vec7& qd);

/// Full inverse dynamics tau = M qdd + C qd + g by recursive Newton-Euler.
Vec7 inverse_dynamics(const KinematicChain& chain, const Vec7& q, const Vec7& qd, const Vec7& qdd);

/// Forward dynamics qdd = M^{-1} (tau - h - g), LDLT solve.
Vec7 forward_dynamics(const KinematicChain& chain, const LinkFrames& f, const Vec7& qd,
                      const Vec7& tau);

}  // namespace swabsim

#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "swabsim/config.hpp"
#include "swabsim/types.hpp"

namespace swabsim {

struct ChainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One revolute joint plus the rigid link that follows it, modified-DH
/// convention: T(i-1 -> i) = RotX(alpha) TransX(a) RotZ(q + theta_offset) TransZ(d).
struct DhLink {
  double a = 0.0;             // m
  double d = 0.0;             // m
  double alpha = 0.0;         // rad
  double theta_offset = 0.0;  // rad
  double mass = 0.0;          // kg
  Vec3 com = Vec3::Zero();    // m, in the link frame
  Mat3 inertia = Mat3::Zero();  // kg m^2, about the COM, link-frame axes
  double lower = 0.0;         // rad
  double upper = 0.0;         // rad
  double torque_limit = 0.0;  // N m, 0 disables saturation for this joint
};

/// 7-revolute-joint serial manipulator with a fixed sensor/swab-mount frame
/// past the flange. The sensor frame's -z axis is the swab axis (the swab
/// extends along -z; insertion advances along -z). Its +z is the axis the
/// loadcell reports contact resistance on as a positive value.
struct KinematicChain {
  static constexpr int kJoints = 7;

  std::array<DhLink, kJoints> links;
  Vec3 gravity{0.0, 0.0, -9.81};  // m/s^2, world frame
  Iso3 flange_to_sensor = Iso3::Identity();
  double flange_d = 0.0;  // m, fixed offset along the last joint's z

  Vec7 lower_limits() const;
  Vec7 upper_limits() const;
  Vec7 torque_limits() const;
  Vec7 clamp_to_limits(const Vec7& q) const;
  bool within_limits(const Vec7& q, double margin = 0.0) const;

  /// Throws ChainError when a structural invariant is violated.
  void validate() const;
};

KinematicChain load_chain(const ConfigFile& cfg);
KinematicChain load_chain_file(const std::string& path);

}  // namespace swabsim

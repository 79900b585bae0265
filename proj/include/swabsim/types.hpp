#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cmath>

namespace swabsim {

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vec7T = Eigen::Matrix<Scalar, 7, 1>;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec7 = Eigen::Matrix<double, 7, 1>;
using VecX = Eigen::VectorXd;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat7 = Eigen::Matrix<double, 7, 7>;
using Mat34 = Eigen::Matrix<double, 3, 4>;
using Mat37 = Eigen::Matrix<double, 3, 7>;
using Mat67 = Eigen::Matrix<double, 6, 7>;
using MatX = Eigen::MatrixXd;
using Quat = Eigen::Quaterniond;
using Iso3 = Eigen::Isometry3d;

/// Pose of a frame: position plus unit quaternion.
struct EePose {
  Vec3 position{Vec3::Zero()};
  Quat orientation{Quat::Identity()};

  Iso3 isometry() const {
    Iso3 t = Iso3::Identity();
    t.linear() = orientation.toRotationMatrix();
    t.translation() = position;
    return t;
  }
  static EePose from_isometry(const Iso3& t) {
    return {t.translation(), Quat(t.linear()).normalized()};
  }
};

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

/// Logistic sigmoid, numerically stable on both tails.
inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline constexpr double deg2rad(double d) { return d * M_PI / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / M_PI; }

/// Rotation angle (rad) between two rotations, in [0, pi].
inline double rotation_distance(const Mat3& a, const Mat3& b) {
  const double c = ((a.transpose() * b).trace() - 1.0) / 2.0;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace swabsim

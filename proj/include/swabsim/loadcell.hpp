#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "swabsim/rng.hpp"
#include "swabsim/types.hpp"

namespace swabsim {

struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Gravity direction unit vector expressed in the sensor frame.
struct OrientationEncoding {
  Vec3 o{0, 0, -1};

  static OrientationEncoding from_sensor_rotation(const Mat3& world_from_sensor,
                                                  const Vec3& gravity_world) {
    return {world_from_sensor.transpose() * gravity_world.normalized()};
  }
  bool normalized(double tol = 1e-9) const { return std::abs(o.squaredNorm() - 1.0) <= 2 * tol; }
};

/// Regressor vector [o_x, o_y, o_z, o_y o_z] of the gravity artifact model.
inline Vec4 gravity_regressors(const OrientationEncoding& o) {
  return Vec4(o.o.x(), o.o.y(), o.o.z(), o.o.y() * o.o.z());
}

/// Gravity + bias contamination model of the loadcell:
///   F_net = F + A [o_x, o_y, o_z, o_y o_z]^T + Z
/// A carries a fixed zero pattern: the x row has no interaction term and the
/// z row depends on o_z only.
struct CalibrationModel {
  Mat34 A = Mat34::Zero();
  Vec3 Z = Vec3::Zero();
  Vec3 r_squared = Vec3::Zero();      // per-axis fit diagnostic
  Vec3 residual_rms = Vec3::Zero();   // per-axis, N
  bool fitted = false;

  Vec3 gravity_artifact(const OrientationEncoding& o) const { return A * gravity_regressors(o); }

  /// Enforced structural zeros: (x, yz), (z, x), (z, y), (z, yz).
  static bool pattern_allows(int row, int col) {
    if (row == 0) return col != 3;
    if (row == 2) return col == 2;
    return true;
  }

  std::string serialize() const;
  static CalibrationModel parse(const std::string& text);
};

/// One calibration observation: mean reading at an orientation with no
/// external force applied.
struct CalibrationSample {
  OrientationEncoding orientation;
  Vec3 mean_f_net = Vec3::Zero();  // N
  int sample_count = 1;
};

struct RawReading {
  Vec3 f_net = Vec3::Zero();
  bool overload = false;  // magnitude hit the cell capacity and was clamped
};

/// Raw loadcell sample: true force + gravity artifact + bias + per-axis
/// Gaussian noise, clamped to the cell capacity.
RawReading sense_raw(const CalibrationModel& truth, const Vec3& true_force,
                     const OrientationEncoding& orientation, double noise_sigma, Rng& rng,
                     double capacity = 10.0);

/// Least-squares fit of (A, Z) over no-load samples, honoring the zero
/// pattern by excluding those regressors. Throws CalibrationError when the
/// design matrix is rank deficient, naming the deficient direction.
CalibrationModel calibrate(const std::vector<CalibrationSample>& samples);

/// Estimate of the external force: raw - A r(o) - Z.
Vec3 compensate(const CalibrationModel& model, const Vec3& raw, const OrientationEncoding& o);

/// CSV of calibration samples: o (3), mean F_net (3), count.
std::string calibration_samples_csv(const std::vector<CalibrationSample>& samples);

}  // namespace swabsim

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "swabsim/dynamics.hpp"
#include "swabsim/types.hpp"

namespace swabsim {

/// Straight task-space insertion line with a fixed orientation along it.
/// The sensor frame's -z axis is held parallel to `direction` so the swab
/// leads the motion.
struct TaskLine {
  EePose start;
  Vec3 direction{1, 0, 0};  // unit, world
  double length = 0.20;     // m

  Vec3 point_at(double fraction) const { return start.position + fraction * length * direction; }
};

/// Build the insertion line: `decline_rad` below the horizontal, advancing
/// along world +x, with the line frame's y axis equal to world y.
TaskLine make_insertion_line(const Vec3& start_position, double decline_rad, double length);

struct IkParams {
  double damping = 1e-3;       // DLS lambda
  int max_iters = 200;
  double pos_tol = 1e-8;       // m
  double ori_tol = 1e-7;       // rad
  double nullspace_gain = 0.05;
  double max_step = 0.2;       // rad, per-iteration step clamp
  Vec7 nominal_posture = Vec7::Zero();
};

struct UnreachableWaypointError : std::runtime_error {
  UnreachableWaypointError(int index_, const std::string& msg)
      : std::runtime_error(msg), index(index_) {}
  int index;
};

struct DegenerateKnotError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Damped least-squares IK for one pose target, seeded at `q_seed`;
/// redundancy resolved by a nullspace pull toward the nominal posture.
Vec7 solve_ik(const KinematicChain& chain, const EePose& target, const Vec7& q_seed,
              const IkParams& params);

/// n joint configurations along the line, each seeded with the previous
/// solution so consecutive waypoints stay continuous.
std::vector<Vec7> solve_waypoints(const KinematicChain& chain, const TaskLine& line, int n,
                                  const IkParams& params);

/// Per-joint, per-segment cubic coefficients over the path parameter s,
/// with `knot_spacing` units of s per segment. Natural boundary conditions:
/// zero second derivative at both ends. All fit offline.
class SplinePath {
 public:
  struct Sample {
    Vec7 q = Vec7::Zero();
    Vec7 qd = Vec7::Zero();   // rad/s at nominal progression
    Vec7 qdd = Vec7::Zero();  // rad/s^2 at nominal progression
    bool clamped = false;     // s was outside [0, s_max]
  };

  SplinePath() = default;

  double s_max() const { return knot_spacing_ * static_cast<double>(segments()); }
  int segments() const { return static_cast<int>(coeff_.size()); }
  int knots() const { return segments() + 1; }
  double knot_spacing() const { return knot_spacing_; }

  /// s-units per second at nominal progression rate 1; maps a full
  /// traversal at rate 1 onto the configured total duration.
  double duration_scale() const { return duration_scale_; }

  /// Evaluate q_d and its time-scaled derivatives at path parameter s.
  Sample eval(double s) const;

  const Vec7& waypoint(int k) const { return waypoints_[k]; }

  struct SegmentCoeff {
    // q(u) = c0 + c1 u + c2 u^2 + c3 u^3, u local in [0, knot_spacing]
    Vec7 c0, c1, c2, c3;
  };
  const SegmentCoeff& coefficients(int segment) const { return coeff_[segment]; }

  friend SplinePath fit_splines(const std::vector<Vec7>& waypoints, double knot_spacing,
                                double total_duration);

 private:
  std::vector<SegmentCoeff> coeff_;
  std::vector<Vec7> waypoints_;
  double knot_spacing_ = 1.0;
  double duration_scale_ = 1.0;
};

/// Natural cubic spline through the waypoints. Throws DegenerateKnotError
/// when the knot layout collapses (non-positive spacing).
SplinePath fit_splines(const std::vector<Vec7>& waypoints, double knot_spacing = 1.0,
                       double total_duration = 15.0);

/// Force-modulated progression of the path parameter (the trajectory slows
/// under axial resistance and never reverses).
struct ProgressParams {
  double nu_s = 12.0;
  double sbar_f = 0.33;     // N
  double rate_scale = 1.0;  // s-units per unit of nominal path time
};

/// Nominal progression rate 1 - sigmoid(nu_s (f_z - sbar_f)), in (0, 1).
double progression_rate(const ProgressParams& params, double f_z);

struct ProgressState {
  double s = 0.0;
  bool saturated = false;  // reached s_max
};

/// s <- s + dt * rate_scale * progression_rate(f_z), clamped at s_max.
ProgressState advance_s(const ProgressState& state, const ProgressParams& params, double f_z,
                        double dt, double s_max);

/// CSV of (s, q_d, qd_d, qdd_d) over a uniform s sweep.
std::string trajectory_csv(const SplinePath& path, int samples_per_segment = 8);

}  // namespace swabsim

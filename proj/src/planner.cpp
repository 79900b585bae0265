#include "swabsim/planner.hpp"

#include <Eigen/Cholesky>
#include <sstream>

#include "swabsim/config.hpp"

namespace swabsim {

TaskLine make_insertion_line(const Vec3& start_position, double decline_rad, double length) {
  TaskLine line;
  line.direction = Vec3(std::cos(decline_rad), 0.0, -std::sin(decline_rad));
  line.length = length;
  line.start.position = start_position;
  // Sensor frame: -z leads along the insertion, y = world y.
  Mat3 r;
  r.col(2) = -line.direction;
  r.col(1) = Vec3::UnitY();
  r.col(0) = r.col(1).cross(r.col(2));
  line.start.orientation = Quat(r).normalized();
  return line;
}

namespace {

Vec6 pose_error(const EePose& target, const Iso3& current) {
  Vec6 e;
  e.head<3>() = target.position - current.translation();
  const Mat3 r_err = target.orientation.toRotationMatrix() * current.linear().transpose();
  const Eigen::AngleAxisd aa(r_err);
  e.tail<3>() = aa.angle() * aa.axis();
  return e;
}

}  // namespace

Vec7 solve_ik(const KinematicChain& chain, const EePose& target, const Vec7& q_seed,
              const IkParams& params) {
  Vec7 q = chain.clamp_to_limits(q_seed);
  const double lambda2 = params.damping * params.damping;
  for (int it = 0; it < params.max_iters; ++it) {
    const LinkFrames f = compute_frames(chain, q);
    const Vec6 e = pose_error(target, f.sensor);
    if (e.head<3>().norm() <= params.pos_tol && e.tail<3>().norm() <= params.ori_tol) return q;

    const Mat67 j = geometric_jacobian_world(chain, f);
    const Mat6 jjt = j * j.transpose() + lambda2 * Mat6::Identity();
    const Eigen::LDLT<Mat6> ldlt(jjt);
    Vec7 dq = j.transpose() * ldlt.solve(e);
    // Nullspace pull toward the nominal posture, tapered near convergence:
    // the damped projector leaks a little task-space motion, which would
    // otherwise stall the residual above the tolerance.
    const double taper = std::min(1.0, e.head<3>().norm() / 1e-5);
    const Vec7 posture = taper * params.nullspace_gain * (params.nominal_posture - q);
    dq += posture - j.transpose() * ldlt.solve(j * posture);

    const double step = dq.template lpNorm<Eigen::Infinity>();
    if (step > params.max_step) dq *= params.max_step / step;
    q = chain.clamp_to_limits(q + dq);
  }
  const Vec6 e = pose_error(target, compute_frames(chain, q).sensor);
  throw UnreachableWaypointError(
      -1, "ik: no convergence (position residual " + format_double(e.head<3>().norm()) +
              " m, orientation residual " + format_double(e.tail<3>().norm()) + " rad)");
}

std::vector<Vec7> solve_waypoints(const KinematicChain& chain, const TaskLine& line, int n,
                                  const IkParams& params) {
  if (n < 2) throw std::invalid_argument("solve_waypoints: need at least 2 waypoints");
  std::vector<Vec7> out;
  out.reserve(n);
  Vec7 seed = params.nominal_posture;
  for (int k = 0; k < n; ++k) {
    EePose target;
    target.position = line.point_at(static_cast<double>(k) / (n - 1));
    target.orientation = line.start.orientation;
    try {
      seed = solve_ik(chain, target, seed, params);
    } catch (const UnreachableWaypointError& e) {
      throw UnreachableWaypointError(k, "waypoint " + std::to_string(k) + ": " + e.what());
    }
    out.push_back(seed);
  }
  return out;
}

SplinePath fit_splines(const std::vector<Vec7>& waypoints, double knot_spacing,
                       double total_duration) {
  if (waypoints.size() < 3) throw std::invalid_argument("fit_splines: need at least 3 waypoints");
  if (!(knot_spacing > 0.0))
    throw DegenerateKnotError("fit_splines: duplicate consecutive knots (knot spacing must be > 0)");
  if (!(total_duration > 0.0)) throw std::invalid_argument("fit_splines: total duration must be > 0");

  const int n = static_cast<int>(waypoints.size());
  const int segs = n - 1;
  const double h = knot_spacing;

  SplinePath path;
  path.knot_spacing_ = h;
  path.waypoints_ = waypoints;
  path.duration_scale_ = (h * segs) / total_duration;
  path.coeff_.resize(segs);

  // Natural spline: solve for interior second derivatives per joint
  // (tridiagonal, Thomas algorithm), ends pinned to zero.
  for (int joint = 0; joint < 7; ++joint) {
    std::vector<double> m(n, 0.0);
    if (n > 2) {
      const int ni = n - 2;
      std::vector<double> diag(ni, 4.0), rhs(ni);
      for (int i = 0; i < ni; ++i)
        rhs[i] = 6.0 * (waypoints[i + 2][joint] - 2.0 * waypoints[i + 1][joint] +
                        waypoints[i][joint]) /
                 (h * h);
      for (int i = 1; i < ni; ++i) {
        const double w = 1.0 / diag[i - 1];
        diag[i] -= w;
        rhs[i] -= w * rhs[i - 1];
      }
      m[ni] = rhs[ni - 1] / diag[ni - 1];
      for (int i = ni - 2; i >= 0; --i) m[i + 1] = (rhs[i] - m[i + 2]) / diag[i];
    }
    for (int k = 0; k < segs; ++k) {
      const double y0 = waypoints[k][joint];
      const double y1 = waypoints[k + 1][joint];
      path.coeff_[k].c0[joint] = y0;
      path.coeff_[k].c1[joint] = (y1 - y0) / h - h * (2.0 * m[k] + m[k + 1]) / 6.0;
      path.coeff_[k].c2[joint] = m[k] / 2.0;
      path.coeff_[k].c3[joint] = (m[k + 1] - m[k]) / (6.0 * h);
    }
  }
  return path;
}

SplinePath::Sample SplinePath::eval(double s) const {
  Sample out;
  if (coeff_.empty()) throw std::logic_error("SplinePath: empty");
  double sc = s;
  if (sc < 0.0 || sc > s_max()) {
    sc = std::clamp(sc, 0.0, s_max());
    out.clamped = true;
  }
  int seg = static_cast<int>(sc / knot_spacing_);
  seg = std::min(seg, segments() - 1);
  const double u = sc - seg * knot_spacing_;
  const SegmentCoeff& c = coeff_[seg];
  const double g = duration_scale_;
  out.q = c.c0 + u * (c.c1 + u * (c.c2 + u * c.c3));
  out.qd = (c.c1 + u * (2.0 * c.c2 + 3.0 * u * c.c3)) * g;
  out.qdd = (2.0 * c.c2 + 6.0 * u * c.c3) * (g * g);
  return out;
}

double progression_rate(const ProgressParams& params, double f_z) {
  // 1 - sigmoid(x) computed as sigmoid(-x): strictly positive for any
  // finite force, so the trajectory creeps rather than stopping dead.
  return sigmoid(-params.nu_s * (f_z - params.sbar_f));
}

ProgressState advance_s(const ProgressState& state, const ProgressParams& params, double f_z,
                        double dt, double s_max) {
  if (!(dt > 0.0)) throw std::invalid_argument("advance_s: dt must be > 0");
  ProgressState out = state;
  out.s = state.s + dt * params.rate_scale * progression_rate(params, f_z);
  if (out.s >= s_max) {
    out.s = s_max;
    out.saturated = true;
  }
  return out;
}

std::string trajectory_csv(const SplinePath& path, int samples_per_segment) {
  std::ostringstream out;
  out << "s";
  for (int j = 0; j < 7; ++j) out << ",q" << j + 1;
  for (int j = 0; j < 7; ++j) out << ",qd" << j + 1;
  for (int j = 0; j < 7; ++j) out << ",qdd" << j + 1;
  out << "\n";
  const int total = path.segments() * samples_per_segment;
  for (int i = 0; i <= total; ++i) {
    const double s = path.s_max() * static_cast<double>(i) / total;
    const auto smp = path.eval(s);
    out << format_double(s);
    for (int j = 0; j < 7; ++j) out << "," << format_double(smp.q[j]);
    for (int j = 0; j < 7; ++j) out << "," << format_double(smp.qd[j]);
    for (int j = 0; j < 7; ++j) out << "," << format_double(smp.qdd[j]);
    out << "\n";
  }
  return out.str();
}

}  // namespace swabsim

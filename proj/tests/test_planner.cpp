#include <doctest.h>

#include "swabsim/planner.hpp"
#include "swabsim/rng.hpp"

using namespace swabsim;

namespace {

KinematicChain panda() {
  static KinematicChain chain =
      load_chain_file(std::string(SWABSIM_CONFIG_DIR) + "/panda_chain.cfg");
  return chain;
}

IkParams default_ik() {
  IkParams ik;
  ik.nominal_posture << -0.744, -0.657, 0.888, -2.652, 2.286, 2.872, -1.850;
  return ik;
}

TaskLine default_line() { return make_insertion_line(Vec3(0.42, 0.0, 0.38), deg2rad(28.0), 0.20); }

}  // namespace

TEST_CASE("insertion line geometry") {
  const TaskLine line = default_line();
  CHECK(line.direction.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(line.direction.z() < 0.0);
  CHECK(std::abs(std::asin(-line.direction.z()) - deg2rad(28.0)) < 1e-12);
  // Sensor -z leads along the insertion.
  const Mat3 r = line.start.orientation.toRotationMatrix();
  CHECK(((-r.col(2)) - line.direction).norm() < 1e-12);
  CHECK((line.point_at(1.0) - line.point_at(0.0)).norm() == doctest::Approx(0.20));
}

TEST_CASE("32 waypoints on the default line: residuals, continuity, orientation hold") {
  const auto chain = panda();
  const TaskLine line = default_line();
  const auto wps = solve_waypoints(chain, line, 32, default_ik());
  REQUIRE(wps.size() == 32);
  const Mat3 r_target = line.start.orientation.toRotationMatrix();
  for (int k = 0; k < 32; ++k) {
    const EePose pose = forward_kinematics(chain, wps[k]);
    const Vec3 target = line.point_at(k / 31.0);
    CHECK((pose.position - target).norm() <= 1e-6);
    CHECK(rotation_distance(pose.orientation.toRotationMatrix(), r_target) <= 1e-6);
    CHECK(chain.within_limits(wps[k]));
    if (k > 0) CHECK((wps[k] - wps[k - 1]).lpNorm<Eigen::Infinity>() <= 0.2);
  }
}

TEST_CASE("two coincident targets give identical solutions") {
  const auto chain = panda();
  TaskLine line = default_line();
  line.length = 0.0;
  const auto wps = solve_waypoints(chain, line, 2, default_ik());
  CHECK((wps[0] - wps[1]).norm() == 0.0);
}

TEST_CASE("a line outside the workspace reports the failing waypoint") {
  const auto chain = panda();
  TaskLine line = default_line();
  line.start.position = Vec3(1.2, 0.0, 0.5);  // beyond reach
  CHECK_THROWS_AS(solve_waypoints(chain, line, 4, default_ik()), UnreachableWaypointError);
  try {
    solve_waypoints(chain, line, 4, default_ik());
  } catch (const UnreachableWaypointError& e) {
    CHECK(e.index >= 0);
  }
}

TEST_CASE("splines through samples of a cubic reproduce it") {
  // Natural spline: the generating cubic must have zero second derivative
  // at both ends to be reproduced exactly; a straight line qualifies, and
  // so does any cubic between its inflection-symmetric ends. Use a linear
  // polynomial per joint for exactness, plus one genuinely cubic joint
  // checked at the knots only.
  std::vector<Vec7> wps;
  const int n = 9;
  for (int i = 0; i < n; ++i) {
    const double s = i;
    Vec7 q;
    for (int j = 0; j < 7; ++j) q[j] = 0.1 * j + 0.03 * (j + 1) * s;
    wps.push_back(q);
  }
  const SplinePath path = fit_splines(wps, 1.0, 15.0);
  for (double s = 0.0; s <= path.s_max(); s += 0.1) {
    const auto smp = path.eval(s);
    for (int j = 0; j < 7; ++j)
      CHECK(smp.q[j] == doctest::Approx(0.1 * j + 0.03 * (j + 1) * s).epsilon(1e-12));
  }
}

TEST_CASE("spline interpolates the waypoints and is C2 at interior knots") {
  Rng rng(31);
  std::vector<Vec7> wps;
  for (int i = 0; i < 12; ++i) {
    Vec7 q;
    for (int j = 0; j < 7; ++j) q[j] = rng.uniform(-1.0, 1.0);
    wps.push_back(q);
  }
  const SplinePath path = fit_splines(wps, 1.0, 15.0);

  for (int i = 0; i < 12; ++i) {
    const auto smp = path.eval(static_cast<double>(i));
    CHECK((smp.q - wps[i]).cwiseAbs().maxCoeff() <= 1e-12);
  }

  // Both sides of every interior knot straight from the coefficients:
  // left segment at u = h, right segment at u = 0.
  const double h = path.knot_spacing();
  for (int k = 1; k < 11; ++k) {
    const auto& l = path.coefficients(k - 1);
    const auto& r = path.coefficients(k);
    const Vec7 pos_left = l.c0 + h * (l.c1 + h * (l.c2 + h * l.c3));
    CHECK((pos_left - r.c0).cwiseAbs().maxCoeff() <= 1e-12);
    const Vec7 vel_left = l.c1 + h * (2.0 * l.c2 + 3.0 * h * l.c3);
    CHECK((vel_left - r.c1).cwiseAbs().maxCoeff() <= 1e-9);
    const Vec7 acc_left = 2.0 * l.c2 + 6.0 * h * l.c3;
    CHECK((acc_left - 2.0 * r.c2).cwiseAbs().maxCoeff() <= 1e-9);
  }

  // Natural boundary: zero curvature at the ends.
  CHECK(path.eval(0.0).qdd.cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(path.eval(path.s_max()).qdd.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("derivatives match finite differences over s") {
  Rng rng(41);
  std::vector<Vec7> wps;
  for (int i = 0; i < 10; ++i) {
    Vec7 q;
    for (int j = 0; j < 7; ++j) q[j] = rng.uniform(-1.5, 1.5);
    wps.push_back(q);
  }
  const double total = 12.0;
  const SplinePath path = fit_splines(wps, 1.0, total);
  const double gamma = path.duration_scale();
  CHECK(gamma == doctest::Approx(path.s_max() / total));

  // Stay clear of the knots: the third derivative jumps there and would
  // contaminate the stencil.
  for (double s = 0.35; s < path.s_max() - 0.3; s += 0.77) {
    const auto mid = path.eval(s);
    // dq/ds via finite differences; eval returns dq/ds * gamma.
    const double h1 = 1e-6;
    const Vec7 fd1 = (path.eval(s + h1).q - path.eval(s - h1).q) / (2 * h1) * gamma;
    CHECK((mid.qd - fd1).cwiseAbs().maxCoeff() <= 1e-6);
    // Segments are cubic, so the second central difference is exact for
    // any in-segment step; a larger step keeps roundoff below tolerance.
    const double h2 = 1e-4;
    const Vec7 fd2 = (path.eval(s + h2).q - 2.0 * mid.q + path.eval(s - h2).q) / (h2 * h2) *
                     gamma * gamma;
    CHECK((mid.qdd - fd2).cwiseAbs().maxCoeff() <= 1e-4);
  }
}

TEST_CASE("eval clamps out-of-range s and flags it") {
  std::vector<Vec7> wps(4, Vec7::Zero());
  wps[1].setConstant(0.5);
  wps[2].setConstant(0.25);
  wps[3].setConstant(1.0);
  const SplinePath path = fit_splines(wps, 1.0, 5.0);
  const auto lo = path.eval(-0.5);
  CHECK(lo.clamped);
  CHECK((lo.q - wps[0]).norm() == 0.0);
  const auto hi = path.eval(99.0);
  CHECK(hi.clamped);
  CHECK((hi.q - wps[3]).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_FALSE(path.eval(1.5).clamped);
}

TEST_CASE("degenerate knots and too-few waypoints are rejected") {
  std::vector<Vec7> wps(5, Vec7::Zero());
  CHECK_THROWS_AS(fit_splines(wps, 0.0, 15.0), DegenerateKnotError);
  CHECK_THROWS_AS(fit_splines({Vec7::Zero(), Vec7::Zero()}, 1.0, 15.0), std::invalid_argument);
}

TEST_CASE("progression rate at the published operating points") {
  ProgressParams p;  // nu_s = 12, sbar_f = 0.33
  CHECK(progression_rate(p, 0.33) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(progression_rate(p, 0.0) == doctest::Approx(0.9813).epsilon(1e-4));
  CHECK(progression_rate(p, 1.0) == doctest::Approx(3.2e-4).epsilon(2e-2));
}

TEST_CASE("progression is strictly inside (0,1), monotone decreasing, never reverses") {
  ProgressParams p;
  double prev = 1.0;
  for (double f = -2.0; f <= 5.0; f += 0.05) {
    const double r = progression_rate(p, f);
    CHECK(r > 0.0);
    CHECK(r < 1.0);
    CHECK(r <= prev);
    prev = r;
  }

  ProgressState st;
  Rng rng(43);
  for (int i = 0; i < 1000; ++i) {
    const double before = st.s;
    st = advance_s(st, p, rng.uniform(0.0, 1.0), 1e-3, 5.0);
    CHECK(st.s >= before);
    CHECK(st.s <= 5.0);
  }
}

TEST_CASE("advance_s clamps at s_max and scales with rate_scale") {
  ProgressParams p;
  p.rate_scale = 2.0;
  ProgressState st;
  st.s = 0.0;
  const auto one = advance_s(st, p, 0.33, 0.5, 10.0);
  CHECK(one.s == doctest::Approx(0.5 * 2.0 * 0.5).epsilon(1e-12));
  st.s = 9.999;
  const auto end = advance_s(st, p, 0.0, 1.0, 10.0);
  CHECK(end.s == 10.0);
  CHECK(end.saturated);
  CHECK_THROWS_AS(advance_s(st, p, 0.0, 0.0, 10.0), std::invalid_argument);
}

TEST_CASE("dense FK sweep of the fitted path stays on the task line") {
  const auto chain = panda();
  const TaskLine line = default_line();
  const auto wps = solve_waypoints(chain, line, 32, default_ik());
  const SplinePath path = fit_splines(wps, 1.0, 15.0);
  double worst = 0.0;
  for (int i = 0; i <= 620; ++i) {
    const double s = path.s_max() * i / 620.0;
    const EePose pose = forward_kinematics(chain, path.eval(s).q);
    // Distance from the infinite line through start along direction.
    const Vec3 d = pose.position - line.start.position;
    const Vec3 offline = d - d.dot(line.direction) * line.direction;
    worst = std::max(worst, offline.norm());
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("trajectory export has one row per sample and full precision") {
  std::vector<Vec7> wps(5, Vec7::Zero());
  for (int i = 0; i < 5; ++i) wps[i].setConstant(0.1 * i);
  const SplinePath path = fit_splines(wps, 1.0, 15.0);
  const std::string csv = trajectory_csv(path, 4);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 4 + 1);
  CHECK(csv.rfind("s,q1", 0) == 0);
}

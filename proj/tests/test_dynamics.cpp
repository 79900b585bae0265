#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "swabsim/dynamics.hpp"
#include "swabsim/rng.hpp"

using namespace swabsim;

namespace {

// generated by tests/tools/frozen_reference.py
const double kHomePosition[] = {0.306890566592941, -7.37941400573457e-17, 0.540282052302839};
const double kHomeRotation[] = {0.707106781186547, 0.707106781186548,  1.57974481938487e-16,
                                -0.707106781186548, 0.707106781186547, 1.73191211247099e-16,
                                2.51092218095863e-17, -2.19820138019884e-16, 1};
const double kHomeMass[] = {
    0.390190442866096,     -0.0184530374953076,   0.350460111901828,    0.000987499999999999,
    0.0188518792788729,    -7.49999999999964e-05, -0.000520000000000001, -0.0184530374953076,
    1.34541259678838,      -0.0142558058261758,   -0.520107515894192,   7.7735835176473e-05,
    -0.0293793027113008,   -7.68705317020778e-20, 0.350460111901828,    -0.0142558058261758,
    0.799904448850453,     -4.41941738240859e-05, 0.0210680934166676,   0.000477297077300928,
    -0.000367695526217007, 0.000987499999999999,  -0.520107515894192,   -4.41941738240859e-05,
    0.7182913475,          0.00405,               0.07116051,           3.18408167778313e-20,
    0.0188518792788729,    7.7735835176473e-05,   0.0210680934166676,   0.00405,
    0.01109616,            -0.000749999999999999, -4.50351389559208e-19, -7.49999999999964e-05,
    -0.0293793027113008,   0.000477297077300928,  0.07116051,           -0.000749999999999999,
    0.01862856,            3.1840816777831e-20,   -0.000520000000000001, -7.68705317020778e-20,
    -0.000367695526217007, 3.18408167778313e-20,  -4.50351389559208e-19, 3.1840816777831e-20,
    0.00052};
const double kHomeGravity[] = {0, -0.170153093392855, -0.34683587557538, 18.4447619986372,
                               0.245249999863972, 1.46953799884386, 0};

KinematicChain panda() {
  static KinematicChain chain = load_chain_file(std::string(SWABSIM_CONFIG_DIR) + "/panda_chain.cfg");
  return chain;
}

Vec7 ready_pose() {
  Vec7 q;
  q << 0, -M_PI / 4, 0, -3 * M_PI / 4, 0, M_PI / 2, M_PI / 4;
  return q;
}

Vec7 random_q(const KinematicChain& chain, Rng& rng, double margin = 0.05) {
  Vec7 q;
  for (int i = 0; i < 7; ++i) {
    const double lo = chain.links[i].lower + margin;
    const double hi = chain.links[i].upper - margin;
    q[i] = rng.uniform(lo, hi);
  }
  return q;
}

Vec7 random_vec7(Rng& rng, double scale) {
  Vec7 v;
  for (int i = 0; i < 7; ++i) v[i] = rng.uniform(-scale, scale);
  return v;
}

}  // namespace

TEST_CASE("forward kinematics matches the frozen home-pose reference") {
  const auto chain = panda();
  const EePose pose = forward_kinematics(chain, ready_pose());
  for (int i = 0; i < 3; ++i) CHECK(pose.position[i] == doctest::Approx(kHomePosition[i]).epsilon(1e-12));
  const Mat3 r = pose.orientation.toRotationMatrix();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(r(i, j) - kHomeRotation[3 * i + j]) < 1e-12);
  CHECK(std::abs(pose.orientation.norm() - 1.0) < 1e-9);
}

TEST_CASE("mass matrix matches the frozen home-pose reference") {
  const Mat7 m = mass_matrix(panda(), ready_pose());
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      CHECK(std::abs(m(i, j) - kHomeMass[7 * i + j]) < 1e-10);
}

TEST_CASE("gravity vector matches the frozen home-pose reference") {
  const Vec7 g = gravity_vector(panda(), ready_pose());
  for (int i = 0; i < 7; ++i) CHECK(std::abs(g[i] - kHomeGravity[i]) < 1e-6);
}

TEST_CASE("mass matrix is symmetric positive definite and matches the energy oracle") {
  const auto chain = panda();
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec7 q = random_q(chain, rng);
    const Mat7 m = mass_matrix(chain, q);
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    Eigen::SelfAdjointEigenSolver<Mat7> es(m);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    const Mat7 ref = oracle::energy_mass_matrix(chain, q);
    CHECK((m - ref).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("kinetic energy matches per-link velocity propagation") {
  const auto chain = panda();
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec7 q = random_q(chain, rng);
    const Vec7 qd = random_vec7(rng, 1.5);
    const double lib = kinetic_energy(chain, q, qd);
    const double ref = oracle::propagated_kinetic_energy(chain, q, qd);
    CHECK(std::abs(lib - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("no velocity, no Coriolis force") {
  const auto chain = panda();
  const Vec7 c_qd = coriolis_matrix(chain, ready_pose(), Vec7::Zero()) * Vec7::Zero();
  CHECK(c_qd.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dM/dt - 2C is skew-symmetric (Christoffel construction)") {
  const auto chain = panda();
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec7 q = random_q(chain, rng);
    const Vec7 qd = random_vec7(rng, 1.0);
    const Mat7 c = coriolis_matrix(chain, q, qd);
    const double h = 1e-6;
    const Mat7 mdot =
        (mass_matrix(chain, q + h * qd) - mass_matrix(chain, q - h * qd)) / (2.0 * h);
    const Mat7 skew = mdot - 2.0 * c;
    // x^T S x = 0 for skew S; check both the matrix and the quadratic form.
    CHECK((skew + skew.transpose()).cwiseAbs().maxCoeff() <= 1e-8);
    const Vec7 x = random_vec7(rng, 1.0);
    CHECK(std::abs(x.dot(skew * x)) <= 1e-8 * std::max(1.0, x.squaredNorm()));
  }
}

TEST_CASE("inverse dynamics identity against the link-frame RNE oracle") {
  const auto chain = panda();
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec7 q = random_q(chain, rng);
    const Vec7 qd = random_vec7(rng, 1.0);
    const Vec7 qdd = random_vec7(rng, 2.0);
    const Vec7 ref = oracle::rne_inverse_dynamics(chain, q, qd, qdd);

    const Vec7 lhs = mass_matrix(chain, q) * qdd + coriolis_matrix(chain, q, qd) * qd +
                     gravity_vector(chain, q);
    CHECK((lhs - ref).cwiseAbs().maxCoeff() <= 1e-8);

    // The library's own RNE and velocity-product routes agree as well.
    CHECK((inverse_dynamics(chain, q, qd, qdd) - ref).cwiseAbs().maxCoeff() <= 1e-8);
    const LinkFrames f = compute_frames(chain, q);
    const Vec7 h = velocity_product_torque(chain, f, qd);
    CHECK((coriolis_matrix(chain, q, qd) * qd - h).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("gravity vector is the gradient of the potential energy") {
  const auto chain = panda();
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec7 q = random_q(chain, rng);
    const Vec7 g = gravity_vector(chain, q);
    const double h = 1e-6;
    for (int j = 0; j < 7; ++j) {
      Vec7 qp = q, qm = q;
      qp[j] += h;
      qm[j] -= h;
      const double fd =
          (oracle::potential_energy(chain, qp) - oracle::potential_energy(chain, qm)) / (2 * h);
      CHECK(std::abs(g[j] - fd) <= 1e-6);
    }
  }
}

TEST_CASE("zero gravity means zero gravity torque") {
  auto chain = panda();
  chain.gravity = Vec3::Zero();
  Rng rng(9);
  const Vec7 g = gravity_vector(chain, random_q(chain, rng));
  CHECK(g.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("COMs on the first joint axis give zero first gravity entry") {
  auto chain = panda();
  // Upright chain: no lateral offsets, every COM on the first joint's axis.
  for (int i = 0; i < 7; ++i) {
    chain.links[i].com = Vec3::Zero();
    chain.links[i].a = 0.0;
    chain.links[i].alpha = 0.0;
    chain.links[i].d = 0.1;
    chain.links[i].lower = -3.0;
    chain.links[i].upper = 3.0;
  }
  Rng rng(13);
  const Vec7 q = random_q(chain, rng);
  const Vec7 g = gravity_vector(chain, q);
  CHECK(std::abs(g[0]) < 1e-12);
}

TEST_CASE("jacobian columns match finite differences of forward kinematics") {
  const auto chain = panda();
  Rng rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const Vec7 q = random_q(chain, rng);
    const LinkFrames f = compute_frames(chain, q);
    const Mat37 jw = position_jacobian_world(chain, f);
    const double h = 1e-7;
    for (int j = 0; j < 7; ++j) {
      Vec7 qp = q, qm = q;
      qp[j] += h;
      qm[j] -= h;
      const Vec3 fd = (forward_kinematics(chain, qp).position -
                       forward_kinematics(chain, qm).position) /
                      (2 * h);
      CHECK((jw.col(j) - fd).cwiseAbs().maxCoeff() <= 1e-6);
    }
    // The sensor-frame expression is the same matrix rotated.
    const Mat37 js = jacobian(chain, q);
    CHECK((f.sensor.linear() * js - jw).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("J qd equals the finite-difference velocity of the FK position") {
  const auto chain = panda();
  Rng rng(19);
  const Vec7 q = random_q(chain, rng);
  const Vec7 qd = random_vec7(rng, 1.0);
  const LinkFrames f = compute_frames(chain, q);
  const Vec3 v = position_jacobian_world(chain, f) * qd;
  const double h = 1e-7;
  const Vec3 fd =
      (forward_kinematics(chain, q + h * qd).position - forward_kinematics(chain, q - h * qd).position) /
      (2 * h);
  CHECK((v - fd).cwiseAbs().maxCoeff() <= 1e-6);

  CHECK((position_jacobian_world(chain, f) * Vec7::Zero()).norm() == 0.0);
}

TEST_CASE("pure final-joint rotation leaves the sensor position fixed when the mount is on its axis") {
  auto chain = panda();
  // Put the sensor frame on the last joint's axis.
  chain.links[6].a = 0.0;
  chain.flange_to_sensor = Iso3::Identity();
  chain.flange_d = 0.05;
  const Vec7 q = ready_pose();
  Vec7 q2 = q;
  q2[6] += 0.7;
  const EePose a = forward_kinematics(chain, q);
  const EePose b = forward_kinematics(chain, q2);
  CHECK((a.position - b.position).norm() < 1e-12);
  CHECK(rotation_distance(a.orientation.toRotationMatrix(), b.orientation.toRotationMatrix()) ==
        doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("force along the last-link axis exerts no torque on wrist joints whose axes it crosses") {
  auto chain = panda();
  chain.links[6].a = 0.0;  // sensor on the last joint axis
  chain.flange_to_sensor = Iso3::Identity();
  chain.flange_d = 0.05;
  const Vec7 q = ready_pose();
  const LinkFrames f = compute_frames(chain, q);
  const Vec3 axis = f.sensor.linear().col(2);  // last-link axis, world
  const Vec7 tau = position_jacobian_world(chain, f).transpose() * axis;
  // Joint 7 rotates about this very axis and joint 6's axis intersects it.
  CHECK(std::abs(tau[6]) < 1e-12);
  CHECK(std::abs(tau[5]) < 1e-9);
}

TEST_CASE("non-finite input is rejected") {
  const auto chain = panda();
  Vec7 q = ready_pose();
  q[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(mass_matrix(chain, q), DynamicsError);
  CHECK_THROWS_AS(forward_kinematics(chain, q), DynamicsError);
}

TEST_CASE("chain validation rejects broken definitions") {
  auto chain = panda();
  chain.links[2].mass = 0.0;
  CHECK_THROWS_AS(chain.validate(), ChainError);
  chain = panda();
  chain.links[4].inertia = -Mat3::Identity();
  CHECK_THROWS_AS(chain.validate(), ChainError);
  chain = panda();
  chain.links[0].lower = chain.links[0].upper;
  CHECK_THROWS_AS(chain.validate(), ChainError);
}

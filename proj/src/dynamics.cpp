#include "swabsim/dynamics.hpp"

#include <Eigen/Cholesky>

namespace swabsim {

namespace {

/// Spatial vectors are [omega; v] with the linear part referred to the
/// world origin. Forces are [n; f] with the moment about the world origin.
using SpatialVec = Vec6;
using SpatialMat = Mat6;

SpatialMat crm(const SpatialVec& m) {
  SpatialMat x = SpatialMat::Zero();
  const Mat3 w = skew(m.head<3>());
  x.topLeftCorner<3, 3>() = w;
  x.bottomLeftCorner<3, 3>() = skew(m.tail<3>());
  x.bottomRightCorner<3, 3>() = w;
  return x;
}

SpatialMat crf(const SpatialVec& m) { return -crm(m).transpose(); }

/// Spatial inertia of one link expressed at the world origin.
SpatialMat spatial_inertia_at_origin(double mass, const Vec3& com, const Mat3& inertia_world) {
  const Mat3 cx = skew(com);
  SpatialMat I;
  I.topLeftCorner<3, 3>() = inertia_world + mass * cx * cx.transpose();
  I.topRightCorner<3, 3>() = mass * cx;
  I.bottomLeftCorner<3, 3>() = mass * cx.transpose();
  I.bottomRightCorner<3, 3>() = mass * Mat3::Identity();
  return I;
}

SpatialVec motion_subspace(const LinkFrames& f, int i) {
  SpatialVec s;
  s.head<3>() = f.joint_axis[i];
  s.tail<3>() = f.joint_origin[i].cross(f.joint_axis[i]);
  return s;
}

void check_finite(const Vec7& v, const char* what) {
  if (!v.allFinite()) throw DynamicsError(std::string("dynamics: non-finite ") + what);
}

}  // namespace

LinkFrames compute_frames(const KinematicChain& chain, const Vec7& q) {
  check_finite(q, "joint position");
  LinkFrames f;
  Iso3 t = Iso3::Identity();
  for (int i = 0; i < KinematicChain::kJoints; ++i) {
    const DhLink& l = chain.links[i];
    // RotX(alpha) TransX(a): carries frame i-1 onto joint i's axis.
    t = t * Eigen::AngleAxisd(l.alpha, Vec3::UnitX()) * Eigen::Translation3d(l.a, 0, 0);
    f.joint_axis[i] = t.linear().col(2);
    t = t * Eigen::AngleAxisd(q[i] + l.theta_offset, Vec3::UnitZ()) *
        Eigen::Translation3d(0, 0, l.d);
    f.joint_origin[i] = t.translation();
    f.rotation[i] = t.linear();
    f.com[i] = t * l.com;
    f.inertia_world[i] = f.rotation[i] * l.inertia * f.rotation[i].transpose();
  }
  f.sensor = t * Eigen::Translation3d(0, 0, chain.flange_d) * chain.flange_to_sensor;
  return f;
}

EePose forward_kinematics(const KinematicChain& chain, const Vec7& q) {
  return EePose::from_isometry(compute_frames(chain, q).sensor);
}

Mat37 position_jacobian_world(const KinematicChain& chain, const LinkFrames& f) {
  (void)chain;
  Mat37 J;
  const Vec3 p = f.sensor.translation();
  for (int j = 0; j < KinematicChain::kJoints; ++j)
    J.col(j) = f.joint_axis[j].cross(p - f.joint_origin[j]);
  return J;
}

Mat37 jacobian(const KinematicChain& chain, const Vec7& q) {
  const LinkFrames f = compute_frames(chain, q);
  return f.sensor.linear().transpose() * position_jacobian_world(chain, f);
}

Mat67 geometric_jacobian_world(const KinematicChain& chain, const LinkFrames& f) {
  Mat67 J;
  J.topRows<3>() = position_jacobian_world(chain, f);
  for (int j = 0; j < KinematicChain::kJoints; ++j) J.col(j).tail<3>() = f.joint_axis[j];
  return J;
}

Mat7 mass_matrix(const KinematicChain& chain, const LinkFrames& f) {
  constexpr int n = KinematicChain::kJoints;
  // Composite inertia of the subtree rooted at each link; in world-origin
  // coordinates the composite is a plain suffix sum.
  std::array<SpatialMat, 7> comp;
  comp[n - 1] =
      spatial_inertia_at_origin(chain.links[n - 1].mass, f.com[n - 1], f.inertia_world[n - 1]);
  for (int i = n - 2; i >= 0; --i)
    comp[i] = comp[i + 1] +
              spatial_inertia_at_origin(chain.links[i].mass, f.com[i], f.inertia_world[i]);

  std::array<SpatialVec, 7> s;
  for (int i = 0; i < n; ++i) s[i] = motion_subspace(f, i);

  Mat7 m;
  for (int j = 0; j < n; ++j) {
    const SpatialVec fj = comp[j] * s[j];
    for (int i = 0; i <= j; ++i) {
      m(i, j) = s[i].dot(fj);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

Mat7 mass_matrix(const KinematicChain& chain, const Vec7& q) {
  return mass_matrix(chain, compute_frames(chain, q));
}

std::array<Mat7, 7> mass_matrix_partials(const KinematicChain& chain, const LinkFrames& f) {
  constexpr int n = KinematicChain::kJoints;
  std::array<Mat7, 7> dM;
  for (auto& m : dM) m.setZero();

  // Per-link Jacobians of the COM (linear) and orientation (angular).
  std::array<Mat37, 7> Jv, Jw;
  for (int k = 0; k < n; ++k) {
    Jv[k].setZero();
    Jw[k].setZero();
    for (int j = 0; j <= k; ++j) {
      Jv[k].col(j) = f.joint_axis[j].cross(f.com[k] - f.joint_origin[j]);
      Jw[k].col(j) = f.joint_axis[j];
    }
  }

  for (int l = 0; l < n; ++l) {
    const Vec3& zl = f.joint_axis[l];
    const Mat3 zlx = skew(zl);
    for (int k = l; k < n; ++k) {
      const double mass = chain.links[k].mass;
      const Mat3& Iw = f.inertia_world[k];
      const Mat3 dIw = zlx * Iw - Iw * zlx;
      const Vec3 dck = zl.cross(f.com[k] - f.joint_origin[l]);

      Mat37 dJv = Mat37::Zero();
      Mat37 dJw = Mat37::Zero();
      for (int j = 0; j <= k; ++j) {
        if (l <= j) {
          const Vec3 dz = zl.cross(f.joint_axis[j]);
          dJv.col(j) = dz.cross(f.com[k] - f.joint_origin[j]) +
                       f.joint_axis[j].cross(zl.cross(f.com[k] - f.joint_origin[j]));
          dJw.col(j) = dz;
        } else {
          dJv.col(j) = f.joint_axis[j].cross(dck);
        }
      }

      dM[l] += mass * (dJv.transpose() * Jv[k] + Jv[k].transpose() * dJv);
      dM[l] += dJw.transpose() * Iw * Jw[k] + Jw[k].transpose() * (dIw * Jw[k] + Iw * dJw);
    }
  }
  return dM;
}

Mat7 coriolis_matrix(const KinematicChain& chain, const Vec7& q, const Vec7& qd) {
  check_finite(qd, "joint velocity");
  const LinkFrames f = compute_frames(chain, q);
  const auto dM = mass_matrix_partials(chain, f);
  constexpr int n = KinematicChain::kJoints;
  Mat7 c = Mat7::Zero();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double cij = 0.0;
      for (int k = 0; k < n; ++k)
        cij += 0.5 * (dM[k](i, j) + dM[j](i, k) - dM[i](j, k)) * qd[k];
      c(i, j) = cij;
    }
  return c;
}

Vec7 velocity_product_torque(const KinematicChain& chain, const LinkFrames& f, const Vec7& qd) {
  constexpr int n = KinematicChain::kJoints;
  std::array<SpatialVec, 7> s, v, a, fo;
  SpatialVec vcur = SpatialVec::Zero();
  SpatialVec acur = SpatialVec::Zero();
  for (int i = 0; i < n; ++i) {
    s[i] = motion_subspace(f, i);
    acur += crm(vcur) * s[i] * qd[i];  // qdd = 0
    vcur += s[i] * qd[i];
    v[i] = vcur;
    a[i] = acur;
  }
  for (int i = 0; i < n; ++i) {
    const SpatialMat I =
        spatial_inertia_at_origin(chain.links[i].mass, f.com[i], f.inertia_world[i]);
    fo[i] = I * a[i] + crf(v[i]) * (I * v[i]);
  }
  Vec7 tau;
  SpatialVec fsum = SpatialVec::Zero();
  for (int i = n - 1; i >= 0; --i) {
    fsum += fo[i];
    tau[i] = s[i].dot(fsum);
  }
  return tau;
}

Vec7 gravity_vector(const KinematicChain& chain, const LinkFrames& f) {
  constexpr int n = KinematicChain::kJoints;
  Vec7 g = Vec7::Zero();
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k)
      g[j] -= chain.links[k].mass *
              chain.gravity.dot(f.joint_axis[j].cross(f.com[k] - f.joint_origin[j]));
  return g;
}

Vec7 gravity_vector(const KinematicChain& chain, const Vec7& q) {
  return gravity_vector(chain, compute_frames(chain, q));
}

double potential_energy(const KinematicChain& chain, const LinkFrames& f) {
  double u = 0.0;
  for (int k = 0; k < KinematicChain::kJoints; ++k)
    u -= chain.links[k].mass * chain.gravity.dot(f.com[k]);
  return u;
}

double kinetic_energy(const KinematicChain& chain, const Vec7& q, const Vec7& qd) {
  return 0.5 * qd.dot(mass_matrix(chain, q) * qd);
}

Vec7 inverse_dynamics(const KinematicChain& chain, const Vec7& q, const Vec7& qd,
                      const Vec7& qdd) {
  check_finite(qd, "joint velocity");
  check_finite(qdd, "joint acceleration");
  const LinkFrames f = compute_frames(chain, q);
  constexpr int n = KinematicChain::kJoints;
  std::array<SpatialVec, 7> s, v, a, fo;
  SpatialVec vcur = SpatialVec::Zero();
  SpatialVec acur = SpatialVec::Zero();
  acur.tail<3>() = -chain.gravity;  // uniform field as base acceleration
  for (int i = 0; i < n; ++i) {
    s[i] = motion_subspace(f, i);
    acur += s[i] * qdd[i] + crm(vcur) * s[i] * qd[i];
    vcur += s[i] * qd[i];
    v[i] = vcur;
    a[i] = acur;
  }
  for (int i = 0; i < n; ++i) {
    const SpatialMat I =
        spatial_inertia_at_origin(chain.links[i].mass, f.com[i], f.inertia_world[i]);
    fo[i] = I * a[i] + crf(v[i]) * (I * v[i]);
  }
  Vec7 tau;
  SpatialVec fsum = SpatialVec::Zero();
  for (int i = n - 1; i >= 0; --i) {
    fsum += fo[i];
    tau[i] = s[i].dot(fsum);
  }
  return tau;
}

Vec7 forward_dynamics(const KinematicChain& chain, const LinkFrames& f, const Vec7& qd,
                      const Vec7& tau) {
  const Mat7 m = mass_matrix(chain, f);
  const Vec7 h = velocity_product_torque(chain, f, qd);
  const Vec7 g = gravity_vector(chain, f);
  return m.ldlt().solve(tau - h - g);
}

}  // namespace swabsim

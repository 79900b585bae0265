#pragma once

// Test-side reference implementations, independent of the library's
// algorithms: the mass matrix from per-link energy Jacobians, per-link
// kinetic energy by velocity propagation, and classical link-frame
// recursive Newton-Euler inverse dynamics.

#include <array>

#include "swabsim/chain.hpp"
#include "swabsim/types.hpp"

namespace oracle {

using swabsim::KinematicChain;
using swabsim::Mat3;
using swabsim::Mat37;
using swabsim::Mat7;
using swabsim::Vec3;
using swabsim::Vec7;

struct WorldLink {
  Mat3 R;
  Vec3 origin, axis, com;
  Mat3 inertia_world;
  double mass;
};

inline std::array<WorldLink, 7> world_links(const KinematicChain& chain, const Vec7& q) {
  std::array<WorldLink, 7> out;
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  for (int i = 0; i < 7; ++i) {
    const auto& l = chain.links[i];
    t = t * Eigen::AngleAxisd(l.alpha, Vec3::UnitX()) * Eigen::Translation3d(l.a, 0, 0);
    out[i].axis = t.linear().col(2);
    t = t * Eigen::AngleAxisd(q[i] + l.theta_offset, Vec3::UnitZ()) *
        Eigen::Translation3d(0, 0, l.d);
    out[i].R = t.linear();
    out[i].origin = t.translation();
    out[i].com = t * l.com;
    out[i].inertia_world = t.linear() * l.inertia * t.linear().transpose();
    out[i].mass = l.mass;
  }
  return out;
}

/// Mass matrix as the sum of per-link energy contributions
/// m Jv^T Jv + Jw^T I Jw with explicitly assembled COM Jacobians.
inline Mat7 energy_mass_matrix(const KinematicChain& chain, const Vec7& q) {
  const auto links = world_links(chain, q);
  Mat7 m = Mat7::Zero();
  for (int k = 0; k < 7; ++k) {
    Mat37 Jv = Mat37::Zero(), Jw = Mat37::Zero();
    for (int j = 0; j <= k; ++j) {
      Jv.col(j) = links[j].axis.cross(links[k].com - links[j].origin);
      Jw.col(j) = links[j].axis;
    }
    m += links[k].mass * Jv.transpose() * Jv + Jw.transpose() * links[k].inertia_world * Jw;
  }
  return m;
}

/// Total kinetic energy by propagating per-link angular velocity and COM
/// velocity directly.
inline double propagated_kinetic_energy(const KinematicChain& chain, const Vec7& q,
                                        const Vec7& qd) {
  const auto links = world_links(chain, q);
  double ke = 0.0;
  Vec3 omega = Vec3::Zero();
  for (int k = 0; k < 7; ++k) {
    omega += links[k].axis * qd[k];
    Vec3 vcom = Vec3::Zero();
    for (int j = 0; j <= k; ++j)
      vcom += links[j].axis.cross(links[k].com - links[j].origin) * qd[j];
    ke += 0.5 * links[k].mass * vcom.squaredNorm() +
          0.5 * omega.dot(links[k].inertia_world * omega);
  }
  return ke;
}

inline double potential_energy(const KinematicChain& chain, const Vec7& q) {
  const auto links = world_links(chain, q);
  double u = 0.0;
  for (const auto& l : links) u -= l.mass * chain.gravity.dot(l.com);
  return u;
}

/// Classical recursive Newton-Euler in link coordinates (outward velocity /
/// acceleration recursion, inward force recursion), modified-DH layout.
inline Vec7 rne_inverse_dynamics(const KinematicChain& chain, const Vec7& q, const Vec7& qd,
                                 const Vec7& qdd) {
  std::array<Mat3, 7> R;       // rotation from frame i to frame i-1
  std::array<Vec3, 7> P;       // origin of frame i in frame i-1 coordinates
  for (int i = 0; i < 7; ++i) {
    const auto& l = chain.links[i];
    const Eigen::Isometry3d t = Eigen::Isometry3d(Eigen::AngleAxisd(l.alpha, Vec3::UnitX())) *
                                Eigen::Translation3d(l.a, 0, 0) *
                                Eigen::AngleAxisd(q[i] + l.theta_offset, Vec3::UnitZ()) *
                                Eigen::Translation3d(0, 0, l.d);
    R[i] = t.linear();
    P[i] = t.translation();
  }

  const Vec3 zhat = Vec3::UnitZ();
  std::array<Vec3, 7> w, wd, vd, F, N;
  Vec3 w_prev = Vec3::Zero();
  Vec3 wd_prev = Vec3::Zero();
  Vec3 vd_prev = -chain.gravity;  // uniform field as base acceleration
  for (int i = 0; i < 7; ++i) {
    const Mat3 Rt = R[i].transpose();
    const Vec3 w_in = Rt * w_prev;
    w[i] = w_in + qd[i] * zhat;
    wd[i] = Rt * wd_prev + w_in.cross(qd[i] * zhat) + qdd[i] * zhat;
    vd[i] = Rt * (vd_prev + wd_prev.cross(P[i]) + w_prev.cross(w_prev.cross(P[i])));
    const Vec3 pc = chain.links[i].com;
    const Vec3 vcd = vd[i] + wd[i].cross(pc) + w[i].cross(w[i].cross(pc));
    F[i] = chain.links[i].mass * vcd;
    N[i] = chain.links[i].inertia * wd[i] + w[i].cross(chain.links[i].inertia * w[i]);
    w_prev = w[i];
    wd_prev = wd[i];
    vd_prev = vd[i];
  }

  Vec7 tau;
  Vec3 f_next = Vec3::Zero();
  Vec3 n_next = Vec3::Zero();
  for (int i = 6; i >= 0; --i) {
    Vec3 f, n;
    if (i == 6) {
      f = F[i];
      n = N[i] + chain.links[i].com.cross(F[i]);
    } else {
      const Vec3 f_rot = R[i + 1] * f_next;
      f = f_rot + F[i];
      n = N[i] + R[i + 1] * n_next + chain.links[i].com.cross(F[i]) + P[i + 1].cross(f_rot);
    }
    tau[i] = n.dot(zhat);
    f_next = f;
    n_next = n;
  }
  return tau;
}

}  // namespace oracle

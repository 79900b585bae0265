#include "swabsim/chain.hpp"

#include <Eigen/Eigenvalues>

namespace swabsim {

Vec7 KinematicChain::lower_limits() const {
  Vec7 v;
  for (int i = 0; i < kJoints; ++i) v[i] = links[i].lower;
  return v;
}

Vec7 KinematicChain::upper_limits() const {
  Vec7 v;
  for (int i = 0; i < kJoints; ++i) v[i] = links[i].upper;
  return v;
}

Vec7 KinematicChain::torque_limits() const {
  Vec7 v;
  for (int i = 0; i < kJoints; ++i) v[i] = links[i].torque_limit;
  return v;
}

Vec7 KinematicChain::clamp_to_limits(const Vec7& q) const {
  Vec7 out;
  for (int i = 0; i < kJoints; ++i) out[i] = std::clamp(q[i], links[i].lower, links[i].upper);
  return out;
}

bool KinematicChain::within_limits(const Vec7& q, double margin) const {
  for (int i = 0; i < kJoints; ++i)
    if (q[i] < links[i].lower - margin || q[i] > links[i].upper + margin) return false;
  return true;
}

void KinematicChain::validate() const {
  for (int i = 0; i < kJoints; ++i) {
    const DhLink& l = links[i];
    const std::string id = "link" + std::to_string(i + 1);
    if (!(l.mass > 0.0)) throw ChainError("chain: " + id + " mass must be > 0");
    if (!(l.lower < l.upper)) throw ChainError("chain: " + id + " joint limits must satisfy lower < upper");
    if ((l.inertia - l.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw ChainError("chain: " + id + " inertia must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> es(l.inertia);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw ChainError("chain: " + id + " inertia must be positive definite");
    if (!l.com.allFinite() || !std::isfinite(l.a) || !std::isfinite(l.d) || !std::isfinite(l.alpha))
      throw ChainError("chain: " + id + " has non-finite parameters");
  }
  if (!gravity.allFinite()) throw ChainError("chain: non-finite gravity vector");
}

KinematicChain load_chain(const ConfigFile& cfg) {
  std::map<std::string, std::set<std::string>> allowed;
  allowed["chain"] = {"gravity"};
  allowed["mount"] = {"flange_d", "translation", "rpy"};
  const std::set<std::string> link_keys = {"a", "d",     "alpha", "theta_offset", "mass",
                                           "com", "inertia", "lower", "upper",      "torque_limit"};
  for (int i = 1; i <= KinematicChain::kJoints; ++i) allowed["link" + std::to_string(i)] = link_keys;
  cfg.reject_unknown(allowed);

  KinematicChain chain;
  const auto g = cfg.get_vector("chain", "gravity", 3);
  chain.gravity = Vec3(g[0], g[1], g[2]);

  for (int i = 0; i < KinematicChain::kJoints; ++i) {
    const std::string s = "link" + std::to_string(i + 1);
    if (!cfg.has_section(s)) throw ChainError("chain: missing section [" + s + "]");
    DhLink& l = chain.links[i];
    l.a = cfg.get_double(s, "a");
    l.d = cfg.get_double(s, "d");
    l.alpha = cfg.get_double(s, "alpha");
    l.theta_offset = cfg.get_double_or(s, "theta_offset", 0.0);
    l.mass = cfg.get_double(s, "mass");
    const auto com = cfg.get_vector(s, "com", 3);
    l.com = Vec3(com[0], com[1], com[2]);
    // inertia as upper triangle: Ixx Ixy Ixz Iyy Iyz Izz
    const auto I = cfg.get_vector(s, "inertia", 6);
    l.inertia << I[0], I[1], I[2], I[1], I[3], I[4], I[2], I[4], I[5];
    l.lower = cfg.get_double(s, "lower");
    l.upper = cfg.get_double(s, "upper");
    l.torque_limit = cfg.get_double_or(s, "torque_limit", 0.0);
  }

  chain.flange_d = cfg.get_double_or("mount", "flange_d", 0.0);
  Iso3 t = Iso3::Identity();
  const auto xyz = cfg.get_vector_or("mount", "translation", {0, 0, 0});
  t.translation() = Vec3(xyz[0], xyz[1], xyz[2]);
  const auto rpy = cfg.get_vector_or("mount", "rpy", {0, 0, 0});
  t.linear() = (Eigen::AngleAxisd(rpy[2], Vec3::UnitZ()) * Eigen::AngleAxisd(rpy[1], Vec3::UnitY()) *
                Eigen::AngleAxisd(rpy[0], Vec3::UnitX()))
                   .toRotationMatrix();
  chain.flange_to_sensor = t;

  chain.validate();
  return chain;
}

KinematicChain load_chain_file(const std::string& path) {
  return load_chain(ConfigFile::parse_file(path));
}

}  // namespace swabsim

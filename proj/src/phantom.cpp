#include "swabsim/phantom.hpp"

#include <Eigen/Dense>

namespace swabsim {

void PhantomScene::validate(double swab_radius) const {
  if (centerline.size() < 2) throw PhantomError("scene: centerline needs at least 2 vertices");
  if (radii.size() != centerline.size())
    throw PhantomError("scene: radii count must match centerline vertices");
  for (double r : radii)
    if (!(r > swab_radius))
      throw PhantomError("scene: every channel radius must exceed the swab radius");
  if (!(k_wall > 0) || !(k_end > 0)) throw PhantomError("scene: stiffnesses must be > 0");
  const Mat3 r = pose.linear();
  if ((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9)
    throw PhantomError("scene: pose rotation must be orthonormal");
}

PhantomScene load_scene(const ConfigFile& cfg) {
  cfg.reject_unknown({{"scene", {"centerline", "radii", "k_wall", "k_end"}}});
  PhantomScene s;
  const auto c = cfg.get_vector("scene", "centerline");
  if (c.size() % 3 != 0) throw PhantomError("scene: centerline needs 3 numbers per vertex");
  for (std::size_t i = 0; i + 2 < c.size(); i += 3) s.centerline.emplace_back(c[i], c[i + 1], c[i + 2]);
  s.radii = cfg.get_vector("scene", "radii", s.centerline.size());
  s.k_wall = cfg.get_double_or("scene", "k_wall", 300.0);
  s.k_end = cfg.get_double_or("scene", "k_end", 800.0);
  return s;
}

PhantomScene load_scene_file(const std::string& path) {
  return load_scene(ConfigFile::parse_file(path));
}

namespace {

struct PolylineHit {
  double distance = 0.0;
  Vec3 closest = Vec3::Zero();
  double radius = 0.0;
};

PolylineHit closest_on_centerline(const PhantomScene& scene, const Vec3& p) {
  PolylineHit best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < scene.centerline.size(); ++i) {
    const Vec3& a = scene.centerline[i];
    const Vec3 ab = scene.centerline[i + 1] - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const Vec3 c = a + t * ab;
    const double d = (p - c).norm();
    if (d < best.distance) {
      best.distance = d;
      best.closest = c;
      best.radius = scene.radii[i] + t * (scene.radii[i + 1] - scene.radii[i]);
    }
  }
  return best;
}

}  // namespace

WallContact wall_contact(const PhantomScene& scene, const Vec3& p_local, double swab_radius) {
  WallContact out;
  const double z = p_local.z();
  if (z <= 0.0) return out;  // in front of the face: free space

  const PolylineHit hit = closest_on_centerline(scene, p_local);
  const double bore_depth = hit.distance - (hit.radius - swab_radius);
  // Penetration into the solid = distance to the nearest boundary, which is
  // either the face plane or the bore wall.
  const double depth = std::min(z, bore_depth);
  if (depth <= 0.0) return out;
  out.depth = depth;
  if (z < bore_depth || hit.distance < 1e-12) {
    out.direction = -Vec3::UnitZ();  // out through the face
  } else {
    out.direction = (hit.closest - p_local) / hit.distance;  // toward the bore axis
  }
  return out;
}

double nasopharynx_contact(const PhantomScene& scene, const Vec3& tip_world) {
  const Vec3 tip_local = scene.pose.inverse() * tip_world;
  const double pen = (tip_local - scene.target_local()).dot(scene.end_axis_local());
  return scene.k_end * std::max(0.0, pen);
}

void SwabParams::validate() const {
  if (segments < 2) throw PhantomError("swab: need at least 2 segments");
  if (!(length > 0) || !(radius > 0) || !(flexural_rigidity > 0))
    throw PhantomError("swab: length, radius and rigidity must be > 0");
}

namespace {

/// Contact energy gradient/Hessian for one node (local->world handled by
/// the caller); Gauss-Newton curvature only.
struct NodeContact {
  Vec3 force = Vec3::Zero();  // world
  Mat3 hessian = Mat3::Zero();
  double energy = 0.0;
};

NodeContact node_contact(const PhantomScene& scene, const SwabParams& swab, const Vec3& p_world,
                         bool is_tip) {
  NodeContact out;
  const Vec3 p_local = scene.pose.inverse() * p_world;
  const WallContact w = wall_contact(scene, p_local, swab.radius);
  if (w.depth > 0.0) {
    const Vec3 dir_world = scene.pose.linear() * w.direction;
    out.force += scene.k_wall * w.depth * dir_world;
    out.hessian += scene.k_wall * dir_world * dir_world.transpose();
    out.energy += 0.5 * scene.k_wall * w.depth * w.depth;
  }
  if (is_tip) {
    const double pen = (p_local - scene.target_local()).dot(scene.end_axis_local());
    if (pen > 0.0) {
      const Vec3 axis_world = scene.pose.linear() * scene.end_axis_local();
      out.force += -scene.k_end * pen * axis_world;
      out.hessian += scene.k_end * axis_world * axis_world.transpose();
      out.energy += 0.5 * scene.k_end * pen * pen;
    }
  }
  return out;
}

}  // namespace

ContactResult relax_swab(const PhantomScene& scene, const SwabParams& swab,
                         const Iso3& sensor_pose, SwabState& state) {
  swab.validate();
  const int nseg = swab.segments;
  const int nnodes = nseg + 1;
  const double ell = swab.segment_length();
  const double kappa = swab.hinge_stiffness() / (ell * ell);  // bending in dot-product form

  const Vec3 base = sensor_pose.translation();
  const Vec3 axis = -sensor_pose.linear().col(2);  // swab extends along sensor -z

  if (!state.warm || static_cast<int>(state.nodes.size()) != nnodes) {
    state.nodes.resize(nnodes);
    for (int k = 0; k < nnodes; ++k) state.nodes[k] = base + (k * ell) * axis;
    state.tensions.assign(nseg - 1, 0.0);
    state.warm = true;
  }
  state.nodes[0] = base;
  state.nodes[1] = base + ell * axis;

  const int nfree = nnodes - 2;           // nodes 2..N
  const int m = 3 * nfree;                // position unknowns
  const int nc = nseg - 1;                // length constraints, segments 1..N-1
  auto fidx = [](int node) { return 3 * (node - 2); };

  MatX kkt(m + nc, m + nc);
  VecX rhs(m + nc);
  VecX residual(m + nc);

  // Gradient of bending + contact w.r.t. every node (world frame), plus the
  // constraint terms; free rows feed the KKT system, clamped rows are kept
  // for force bookkeeping.
  std::vector<Vec3> grad(nnodes);
  std::vector<NodeContact> contact(nnodes);

  auto evaluate = [&](std::vector<Vec3>& g, const std::vector<Vec3>& nodes) {
    for (auto& v : g) v.setZero();
    for (int i = 1; i < nseg; ++i) {  // hinge at node i
      const Vec3 d_prev = nodes[i] - nodes[i - 1];
      const Vec3 d_next = nodes[i + 1] - nodes[i];
      g[i - 1] += kappa * d_next;
      g[i] += -kappa * (d_next - d_prev);
      g[i + 1] += -kappa * d_prev;
    }
    for (int k = 0; k < nnodes; ++k) {
      contact[k] = node_contact(scene, swab, nodes[k], k == nseg);
      g[k] -= contact[k].force;  // gradient of energy = -force
    }
  };

  auto constraint_value = [&](int i, const std::vector<Vec3>& nodes) {
    const Vec3 d = nodes[i + 1] - nodes[i];
    return 0.5 * (d.squaredNorm() - ell * ell);
  };

  auto dual_residual = [&](std::vector<Vec3>& g, const std::vector<Vec3>& nodes,
                           const std::vector<double>& lam) {
    evaluate(g, nodes);
    // Add constraint force contributions: lambda_i * grad g_i.
    for (int i = 1; i < nseg; ++i) {
      const Vec3 d = nodes[i + 1] - nodes[i];
      g[i] += lam[i - 1] * (-d);
      g[i + 1] += lam[i - 1] * d;
    }
  };

  auto fill_residual = [&](VecX& r, std::vector<Vec3>& g, const std::vector<Vec3>& nodes,
                           const std::vector<double>& lam) {
    dual_residual(g, nodes, lam);
    for (int k = 2; k < nnodes; ++k) r.segment<3>(fidx(k)) = g[k];
    for (int i = 1; i < nseg; ++i) r[m + i - 1] = 1e3 * constraint_value(i, nodes);
  };

  std::vector<Vec3> trial_nodes(nnodes);
  std::vector<double> trial_lambda(nc);
  std::vector<Vec3> trial_grad(nnodes);

  int iters = 0;
  bool converged = false;
  double max_move = 0.0;

  for (; iters < swab.max_iters; ++iters) {
    fill_residual(residual, grad, state.nodes, state.tensions);
    const double rnorm = residual.lpNorm<Eigen::Infinity>();

    kkt.setZero();
    // Bending Hessian (constant) on free nodes.
    for (int i = 1; i < nseg; ++i) {
      const int a = i - 1, b = i, c = i + 1;
      auto add = [&](int n1, int n2, double w) {
        if (n1 >= 2 && n2 >= 2)
          kkt.block<3, 3>(fidx(n1), fidx(n2)) += w * Mat3::Identity();
      };
      add(a, c, kappa);
      add(c, a, kappa);
      add(a, b, -kappa);
      add(b, a, -kappa);
      add(b, c, -kappa);
      add(c, b, -kappa);
      add(b, b, 2.0 * kappa);
    }
    // Contact Hessians.
    for (int k = 2; k < nnodes; ++k)
      kkt.block<3, 3>(fidx(k), fidx(k)) += contact[k].hessian;
    // Constraint curvature lambda_i * I and the Jacobian blocks.
    for (int i = 1; i < nseg; ++i) {
      const double lam = state.tensions[i - 1];
      const Vec3 d = state.nodes[i + 1] - state.nodes[i];
      auto addI = [&](int n1, int n2, double w) {
        if (n1 >= 2 && n2 >= 2)
          kkt.block<3, 3>(fidx(n1), fidx(n2)) += w * Mat3::Identity();
      };
      addI(i, i, lam);
      addI(i + 1, i + 1, lam);
      addI(i, i + 1, -lam);
      addI(i + 1, i, -lam);
      const int row = m + i - 1;
      if (i >= 2) {
        kkt.block<1, 3>(row, fidx(i)) = 1e3 * -d.transpose();
        kkt.block<3, 1>(fidx(i), row) = -d;
      }
      kkt.block<1, 3>(row, fidx(i + 1)) = 1e3 * d.transpose();
      kkt.block<3, 1>(fidx(i + 1), row) = d;
    }
    // Mild regularization keeps the factorization healthy when contact
    // makes the reduced Hessian momentarily indefinite.
    for (int i = 0; i < m; ++i) kkt(i, i) += 1e-9;

    rhs = -residual;
    const VecX step = kkt.partialPivLu().solve(rhs);

    // Backtracking on the KKT residual norm.
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 25; ++ls) {
      for (int k = 0; k < nnodes; ++k) trial_nodes[k] = state.nodes[k];
      for (int k = 2; k < nnodes; ++k)
        trial_nodes[k] += alpha * step.segment<3>(fidx(k));
      for (int i = 0; i < nc; ++i) trial_lambda[i] = state.tensions[i] + alpha * step[m + i];
      VecX trial_res(m + nc);
      fill_residual(trial_res, trial_grad, trial_nodes, trial_lambda);
      if (trial_res.lpNorm<Eigen::Infinity>() <= (1.0 - 1e-4 * alpha) * rnorm || ls == 24) {
        accepted = trial_res.lpNorm<Eigen::Infinity>() < rnorm || ls == 24;
        max_move = 0.0;
        for (int k = 2; k < nnodes; ++k)
          max_move = std::max(max_move, (alpha * step.segment<3>(fidx(k))).norm());
        state.nodes = trial_nodes;
        state.tensions = trial_lambda;
        break;
      }
      alpha *= 0.5;
    }
    (void)accepted;

    fill_residual(residual, grad, state.nodes, state.tensions);
    const double dual = residual.head(m).lpNorm<Eigen::Infinity>();
    const double prim = nc > 0 ? residual.tail(nc).lpNorm<Eigen::Infinity>() / 1e3 : 0.0;
    if (max_move < swab.tol_move && dual < swab.tol_force && prim < 1e-12) {
      converged = true;
      ++iters;
      break;
    }
  }

  // Final force bookkeeping at the accepted state.
  fill_residual(residual, grad, state.nodes, state.tensions);

  ContactResult out;
  out.node_forces.resize(nnodes);
  for (int k = 0; k < nnodes; ++k) {
    out.node_forces[k] = contact[k].force;
    out.world_force_sum += contact[k].force;
  }
  out.base_reaction_sensor = -(sensor_pose.linear().transpose() * out.world_force_sum);
  out.tip_position = state.nodes.back();
  out.converged = converged;
  out.iterations = iters;
  out.max_free_node_residual = nfree > 0 ? residual.head(m).lpNorm<Eigen::Infinity>() : 0.0;

  const Vec3 tip_local = scene.pose.inverse() * out.tip_position;
  out.tip_at_nasopharynx =
      (out.tip_position - scene.target_world()).norm() < 5e-3 ||
      (tip_local - scene.target_local()).dot(scene.end_axis_local()) > 0.0;
  const WallContact tip_wall = wall_contact(scene, tip_local, swab.radius);
  out.tip_on_face = tip_wall.depth > 0.0 && tip_wall.direction.dot(-Vec3::UnitZ()) > 0.99;
  return out;
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kSuccess: return "SUCCESS";
    case Outcome::kWedged: return "WEDGED";
    case Outcome::kMistracked: return "MISTRACKED";
    case Outcome::kDiverged: return "DIVERGED";
  }
  return "UNKNOWN";
}

Outcome classify_outcome(const PhantomScene& scene, const Vec3& tip_world, double eps,
                         bool terminated) {
  if (terminated && (tip_world - scene.target_world()).norm() <= 5e-3) return Outcome::kSuccess;
  const Vec3 tip_local = scene.pose.inverse() * tip_world;
  if (tip_local.z() < 0.015 && eps > 0.030) return Outcome::kWedged;
  return Outcome::kMistracked;
}

}  // namespace swabsim

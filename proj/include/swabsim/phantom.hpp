#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "swabsim/config.hpp"
#include "swabsim/types.hpp"

namespace swabsim {

struct PhantomError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parametric nasal-channel phantom: a tapered bore (polyline centerline
/// plus per-vertex radii) carved into a solid half-space. In the scene's
/// local frame the entry (nostril) sits at the origin with the channel
/// descending along +z; everything with local z > 0 outside the bore is
/// solid wall. The leading radii form the nostril funnel; the last vertex
/// is the nasopharynx target backed by a stiffer end wall.
struct PhantomScene {
  std::vector<Vec3> centerline;  // local, first vertex at the nostril
  std::vector<double> radii;     // m, per vertex
  double k_wall = 300.0;         // N/m, bore and face penalty stiffness
  double k_end = 800.0;          // N/m, nasopharynx end-wall stiffness
  Iso3 pose = Iso3::Identity();  // world_from_local (perturbation axis)

  const Vec3& target_local() const { return centerline.back(); }
  Vec3 target_world() const { return pose * target_local(); }
  Vec3 end_axis_local() const {
    const auto n = centerline.size();
    return (centerline[n - 1] - centerline[n - 2]).normalized();
  }

  void validate(double swab_radius) const;
};

PhantomScene load_scene(const ConfigFile& cfg);
PhantomScene load_scene_file(const std::string& path);

/// Penetration query of one point against the phantom solid, local frame.
struct WallContact {
  double depth = 0.0;     // m, > 0 when inside the wall material
  Vec3 direction = Vec3::Zero();  // local unit vector of the restoring force
};

WallContact wall_contact(const PhantomScene& scene, const Vec3& p_local, double swab_radius);

/// Axial resistance (N) of the nasopharynx end wall for a tip position.
double nasopharynx_contact(const PhantomScene& scene, const Vec3& tip_world);

/// Flexible swab clamped to the end-effector: inextensible chain of
/// `segments` equal links with bending springs at the interior nodes.
struct SwabParams {
  int segments = 24;
  double length = 0.15;               // m
  double radius = 0.0015;             // m, contact radius
  double flexural_rigidity = 0.0076;  // N m^2 (EI of a 1.2 mm nitinol rod)
  int max_iters = 500;
  double tol_move = 1e-7;   // m, convergence on max node move
  double tol_force = 1e-6;  // N, convergence on free-node force residual

  double segment_length() const { return length / segments; }
  double hinge_stiffness() const { return flexural_rigidity / segment_length(); }  // N m / rad
  void validate() const;
};

struct SwabState {
  std::vector<Vec3> nodes;       // world, segments+1 entries
  std::vector<double> tensions;  // per constrained segment
  bool warm = false;
};

struct ContactResult {
  std::vector<Vec3> node_forces;       // world, per node
  Vec3 world_force_sum = Vec3::Zero(); // wall force applied to the swab
  Vec3 base_reaction_sensor = Vec3::Zero();  // -(sum) rotated into the sensor frame
  Vec3 tip_position = Vec3::Zero();    // world
  bool tip_at_nasopharynx = false;
  bool tip_on_face = false;            // tip pressing the face around the nostril
  bool converged = true;
  int iterations = 0;
  double max_free_node_residual = 0.0;  // N, constraint-consistent net force
};

/// Quasi-static equilibrium of the swab under bending + wall penalties with
/// the base clamped to the sensor frame (first node at the frame origin,
/// first segment along the swab axis). Non-convergence is reported, not
/// fatal: the last iterate is used.
ContactResult relax_swab(const PhantomScene& scene, const SwabParams& swab,
                         const Iso3& sensor_pose, SwabState& state);

enum class Outcome { kSuccess, kWedged, kMistracked, kDiverged };

const char* outcome_name(Outcome o);

/// Geometric outcome label at the end of a trial. `eps` is the total
/// end-effector displacement from the trial start.
Outcome classify_outcome(const PhantomScene& scene, const Vec3& tip_world, double eps,
                         bool terminated);

}  // namespace swabsim

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swabsim/config.hpp"
#include "swabsim/engine.hpp"

namespace swabsim {

/// Resolved simulation configuration: every module's parameters with the
/// documented defaults, overridable from a sectioned config file. The chain
/// and scene geometries always come from their own files.
struct RunConfig {
  // [chain]
  std::string chain_file = "config/panda_chain.cfg";

  // [sensor]
  double sensor_noise_sigma = 1e-3;  // N
  double sensor_rate_hz = 80.0;
  double sensor_capacity = 10.0;     // N
  std::vector<double> sensor_a_true = {0.31, -0.12, 0.05, 0.22, 0.41, -0.18,
                                       0.07, -0.35};  // axx axy axz ayx ayy ayz ayyz azz
  std::vector<double> sensor_z_true = {0.11, -0.09, 0.17};
  std::vector<double> calibration_orientations;  // 9 x 3 unit vectors, filled by ctor
  int calibration_samples = 100;
  bool calibration_noise = true;

  // [filter]
  double filter_alpha = 1.0;

  // [planner]
  std::vector<double> line_start = {0.42, 0.0, 0.38};
  double decline_deg = 28.0;
  double line_length = 0.20;
  int waypoints = 32;
  double total_duration_s = 15.0;
  std::vector<double> nominal_posture = {-0.744, -0.657, 0.888, -2.652,
                                         2.286,  2.872,  -1.850};
  double ik_damping = 1e-3;
  int ik_max_iters = 200;
  double ik_pos_tol = 1e-8;
  double ik_nullspace_gain = 0.05;
  double ik_max_step = 0.2;
  double nu_s = 12.0;
  double sbar_f = 0.33;

  // [gains]
  std::vector<double> kp = {600, 600, 600, 600, 600, 600, 50};
  std::vector<double> kd = {30, 30, 30, 30, 30, 30, 5};
  std::vector<double> lambda = {450, 450, 45};
  std::string mode = "feedback";

  // [observer]
  double fbar_z = 0.167;
  double nu_f = 30.0;
  double epsbar = 0.085;
  double nu_eps = 40.0;
  double term_threshold = 0.5;

  // [scene]
  std::string scene_file = "config/nasal_scene.cfg";
  bool scene_enabled = true;
  double standoff_m = 0.02;  // swab tip to nostril at trial start

  // [swab]
  int swab_segments = 24;
  double swab_length = 0.15;
  double swab_radius = 0.0015;
  double swab_rigidity = 0.0076;  // N m^2
  int swab_max_iters = 500;
  double swab_tol_move = 1e-7;
  double swab_tol_force = 1e-6;

  // [engine]
  double control_rate_hz = 1000.0;
  int substeps = 4;
  double timeout_s = 60.0;
  double max_joint_speed = 20.0;
  int log_stride = 1;

  // [plan]
  int pairs = 41;
  double perturb_trans_mm = 4.0;  // uniform +- per axis
  double perturb_rot_deg = 5.0;   // uniform +- per axis
  std::uint64_t master_seed = 20220915;
  int jobs = 0;  // 0 = hardware concurrency
  int plan_log_stride = 25;
  int plot_pairs = 3;

  RunConfig();

  /// Defaults overlaid with the file's values; unknown keys rejected.
  static RunConfig load(const std::string& path);
  void apply(const ConfigFile& cfg);

  /// Full resolved dump, suitable for freezing into an output directory.
  ConfigFile to_config() const;

  void validate() const;
};

/// Everything an experiment shares across trials, built once (offline).
struct ExperimentAssets {
  KinematicChain chain;
  TaskLine line;
  std::vector<Vec7> waypoints;
  SplinePath path;
  PhantomScene scene_local;  // pose = identity; world placement per trial
  Iso3 entry_frame;          // world pose of the unperturbed nostril
  CalibrationModel sensor_truth;
  CalibrationModel sensor_fit;
  std::vector<CalibrationSample> calibration_samples;
};

ExperimentAssets build_assets(const RunConfig& cfg);

/// Scene pose for a local perturbation (meters, radians) about the nostril.
Iso3 perturbed_scene_pose(const Iso3& entry_frame, const Vec3& translation, const Vec3& rpy);

TrialSetup make_trial_setup(const RunConfig& cfg, const ExperimentAssets& assets,
                            ControlMode mode, const Iso3& scene_pose, std::uint64_t seed);

/// FNV-1a hash of the resolved configuration with the controller mode
/// masked out, for checking pairing integrity.
std::uint64_t pairing_hash(const RunConfig& cfg, const Iso3& scene_pose);

}  // namespace swabsim

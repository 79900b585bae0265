#include "swabsim/runconfig.hpp"

#include <sstream>

namespace swabsim {

namespace {

/// Default calibration orientations: sensor z vertical, +-30 degree tilts
/// about the sensor x and y axes, and four combined tilts. Expressed as the
/// gravity direction unit vector in the sensor frame.
std::vector<double> default_orientations() {
  std::vector<double> out;
  const double tilts[9][2] = {{0, 0},   {30, 0},  {-30, 0}, {0, 30},   {0, -30},
                              {30, 30}, {30, -30}, {-30, 30}, {-30, -30}};
  for (const auto& t : tilts) {
    const Mat3 r = (Eigen::AngleAxisd(deg2rad(t[0]), Vec3::UnitX()) *
                    Eigen::AngleAxisd(deg2rad(t[1]), Vec3::UnitY()))
                       .toRotationMatrix();
    const Vec3 o = r.transpose() * Vec3(0, 0, -1);
    out.push_back(o.x());
    out.push_back(o.y());
    out.push_back(o.z());
  }
  return out;
}

Vec3 to_vec3(const std::vector<double>& v) { return Vec3(v[0], v[1], v[2]); }

Vec7 to_vec7(const std::vector<double>& v) {
  Vec7 out;
  for (int i = 0; i < 7; ++i) out[i] = v[i];
  return out;
}

}  // namespace

RunConfig::RunConfig() { calibration_orientations = default_orientations(); }

RunConfig RunConfig::load(const std::string& path) {
  RunConfig cfg;
  cfg.apply(ConfigFile::parse_file(path));
  cfg.validate();
  return cfg;
}

void RunConfig::apply(const ConfigFile& c) {
  c.reject_unknown({
      {"chain", {"file"}},
      {"sensor",
       {"noise_sigma", "rate_hz", "capacity", "a_true", "z_true", "calibration_orientations",
        "calibration_samples", "calibration_noise"}},
      {"filter", {"alpha"}},
      {"planner",
       {"line_start", "decline_deg", "line_length", "waypoints", "total_duration_s",
        "nominal_posture", "ik_damping", "ik_max_iters", "ik_pos_tol", "ik_nullspace_gain",
        "ik_max_step", "nu_s", "sbar_f"}},
      {"gains", {"kp", "kd", "lambda", "mode"}},
      {"observer", {"fbar_z", "nu_f", "epsbar", "nu_eps", "threshold"}},
      {"scene", {"file", "enabled", "standoff_m"}},
      {"swab",
       {"segments", "length", "radius", "flexural_rigidity", "max_iters", "tol_move",
        "tol_force"}},
      {"engine", {"control_rate_hz", "substeps", "timeout_s", "max_joint_speed", "log_stride"}},
      {"plan",
       {"pairs", "perturb_trans_mm", "perturb_rot_deg", "master_seed", "jobs", "log_stride",
        "plot_pairs"}},
  });

  if (c.has("chain", "file")) chain_file = c.resolve_path(c.get_string("chain", "file"));

  sensor_noise_sigma = c.get_double_or("sensor", "noise_sigma", sensor_noise_sigma);
  sensor_rate_hz = c.get_double_or("sensor", "rate_hz", sensor_rate_hz);
  sensor_capacity = c.get_double_or("sensor", "capacity", sensor_capacity);
  sensor_a_true = c.get_vector_or("sensor", "a_true", sensor_a_true);
  sensor_z_true = c.get_vector_or("sensor", "z_true", sensor_z_true);
  calibration_orientations =
      c.get_vector_or("sensor", "calibration_orientations", calibration_orientations);
  calibration_samples = static_cast<int>(c.get_int_or("sensor", "calibration_samples",
                                                      calibration_samples));
  calibration_noise = c.get_bool_or("sensor", "calibration_noise", calibration_noise);

  filter_alpha = c.get_double_or("filter", "alpha", filter_alpha);

  line_start = c.get_vector_or("planner", "line_start", line_start);
  decline_deg = c.get_double_or("planner", "decline_deg", decline_deg);
  line_length = c.get_double_or("planner", "line_length", line_length);
  waypoints = static_cast<int>(c.get_int_or("planner", "waypoints", waypoints));
  total_duration_s = c.get_double_or("planner", "total_duration_s", total_duration_s);
  nominal_posture = c.get_vector_or("planner", "nominal_posture", nominal_posture);
  ik_damping = c.get_double_or("planner", "ik_damping", ik_damping);
  ik_max_iters = static_cast<int>(c.get_int_or("planner", "ik_max_iters", ik_max_iters));
  ik_pos_tol = c.get_double_or("planner", "ik_pos_tol", ik_pos_tol);
  ik_nullspace_gain = c.get_double_or("planner", "ik_nullspace_gain", ik_nullspace_gain);
  ik_max_step = c.get_double_or("planner", "ik_max_step", ik_max_step);
  nu_s = c.get_double_or("planner", "nu_s", nu_s);
  sbar_f = c.get_double_or("planner", "sbar_f", sbar_f);

  kp = c.get_vector_or("gains", "kp", kp);
  kd = c.get_vector_or("gains", "kd", kd);
  lambda = c.get_vector_or("gains", "lambda", lambda);
  mode = c.get_string_or("gains", "mode", mode);

  fbar_z = c.get_double_or("observer", "fbar_z", fbar_z);
  nu_f = c.get_double_or("observer", "nu_f", nu_f);
  epsbar = c.get_double_or("observer", "epsbar", epsbar);
  nu_eps = c.get_double_or("observer", "nu_eps", nu_eps);
  term_threshold = c.get_double_or("observer", "threshold", term_threshold);

  if (c.has("scene", "file")) scene_file = c.resolve_path(c.get_string("scene", "file"));
  scene_enabled = c.get_bool_or("scene", "enabled", scene_enabled);
  standoff_m = c.get_double_or("scene", "standoff_m", standoff_m);

  swab_segments = static_cast<int>(c.get_int_or("swab", "segments", swab_segments));
  swab_length = c.get_double_or("swab", "length", swab_length);
  swab_radius = c.get_double_or("swab", "radius", swab_radius);
  swab_rigidity = c.get_double_or("swab", "flexural_rigidity", swab_rigidity);
  swab_max_iters = static_cast<int>(c.get_int_or("swab", "max_iters", swab_max_iters));
  swab_tol_move = c.get_double_or("swab", "tol_move", swab_tol_move);
  swab_tol_force = c.get_double_or("swab", "tol_force", swab_tol_force);

  control_rate_hz = c.get_double_or("engine", "control_rate_hz", control_rate_hz);
  substeps = static_cast<int>(c.get_int_or("engine", "substeps", substeps));
  timeout_s = c.get_double_or("engine", "timeout_s", timeout_s);
  max_joint_speed = c.get_double_or("engine", "max_joint_speed", max_joint_speed);
  log_stride = static_cast<int>(c.get_int_or("engine", "log_stride", log_stride));

  pairs = static_cast<int>(c.get_int_or("plan", "pairs", pairs));
  perturb_trans_mm = c.get_double_or("plan", "perturb_trans_mm", perturb_trans_mm);
  perturb_rot_deg = c.get_double_or("plan", "perturb_rot_deg", perturb_rot_deg);
  master_seed = static_cast<std::uint64_t>(c.get_int_or("plan", "master_seed",
                                                        static_cast<long>(master_seed)));
  jobs = static_cast<int>(c.get_int_or("plan", "jobs", jobs));
  plan_log_stride = static_cast<int>(c.get_int_or("plan", "log_stride", plan_log_stride));
  plot_pairs = static_cast<int>(c.get_int_or("plan", "plot_pairs", plot_pairs));
}

ConfigFile RunConfig::to_config() const {
  ConfigFile c;
  c.set("chain", "file", chain_file);

  c.set("sensor", "noise_sigma", sensor_noise_sigma);
  c.set("sensor", "rate_hz", sensor_rate_hz);
  c.set("sensor", "capacity", sensor_capacity);
  c.set("sensor", "a_true", sensor_a_true);
  c.set("sensor", "z_true", sensor_z_true);
  c.set("sensor", "calibration_orientations", calibration_orientations);
  c.set("sensor", "calibration_samples", static_cast<double>(calibration_samples));
  c.set("sensor", "calibration_noise", std::string(calibration_noise ? "true" : "false"));

  c.set("filter", "alpha", filter_alpha);

  c.set("planner", "line_start", line_start);
  c.set("planner", "decline_deg", decline_deg);
  c.set("planner", "line_length", line_length);
  c.set("planner", "waypoints", static_cast<double>(waypoints));
  c.set("planner", "total_duration_s", total_duration_s);
  c.set("planner", "nominal_posture", nominal_posture);
  c.set("planner", "ik_damping", ik_damping);
  c.set("planner", "ik_max_iters", static_cast<double>(ik_max_iters));
  c.set("planner", "ik_pos_tol", ik_pos_tol);
  c.set("planner", "ik_nullspace_gain", ik_nullspace_gain);
  c.set("planner", "ik_max_step", ik_max_step);
  c.set("planner", "nu_s", nu_s);
  c.set("planner", "sbar_f", sbar_f);

  c.set("gains", "kp", kp);
  c.set("gains", "kd", kd);
  c.set("gains", "lambda", lambda);
  c.set("gains", "mode", mode);

  c.set("observer", "fbar_z", fbar_z);
  c.set("observer", "nu_f", nu_f);
  c.set("observer", "epsbar", epsbar);
  c.set("observer", "nu_eps", nu_eps);
  c.set("observer", "threshold", term_threshold);

  c.set("scene", "file", scene_file);
  c.set("scene", "enabled", std::string(scene_enabled ? "true" : "false"));
  c.set("scene", "standoff_m", standoff_m);

  c.set("swab", "segments", static_cast<double>(swab_segments));
  c.set("swab", "length", swab_length);
  c.set("swab", "radius", swab_radius);
  c.set("swab", "flexural_rigidity", swab_rigidity);
  c.set("swab", "max_iters", static_cast<double>(swab_max_iters));
  c.set("swab", "tol_move", swab_tol_move);
  c.set("swab", "tol_force", swab_tol_force);

  c.set("engine", "control_rate_hz", control_rate_hz);
  c.set("engine", "substeps", static_cast<double>(substeps));
  c.set("engine", "timeout_s", timeout_s);
  c.set("engine", "max_joint_speed", max_joint_speed);
  c.set("engine", "log_stride", static_cast<double>(log_stride));

  c.set("plan", "pairs", static_cast<double>(pairs));
  c.set("plan", "perturb_trans_mm", perturb_trans_mm);
  c.set("plan", "perturb_rot_deg", perturb_rot_deg);
  c.set("plan", "master_seed", static_cast<double>(master_seed));
  c.set("plan", "jobs", static_cast<double>(jobs));
  c.set("plan", "log_stride", static_cast<double>(plan_log_stride));
  c.set("plan", "plot_pairs", static_cast<double>(plot_pairs));
  return c;
}

void RunConfig::validate() const {
  if (sensor_a_true.size() != 8) throw ConfigError("sensor.a_true needs 8 entries");
  if (sensor_z_true.size() != 3) throw ConfigError("sensor.z_true needs 3 entries");
  if (calibration_orientations.size() % 3 != 0 || calibration_orientations.size() < 9)
    throw ConfigError("sensor.calibration_orientations needs 3 numbers per orientation");
  if (line_start.size() != 3) throw ConfigError("planner.line_start needs 3 entries");
  if (nominal_posture.size() != 7) throw ConfigError("planner.nominal_posture needs 7 entries");
  if (kp.size() != 7 || kd.size() != 7) throw ConfigError("gains.kp/kd need 7 entries");
  if (lambda.size() != 3) throw ConfigError("gains.lambda needs 3 entries");
  if (mode != "feedback" && mode != "baseline")
    throw ConfigError("gains.mode must be 'feedback' or 'baseline'");
  if (waypoints < 2) throw ConfigError("planner.waypoints must be >= 2");
  if (pairs < 1) throw ConfigError("plan.pairs must be >= 1");
}

namespace {

CalibrationModel ground_truth_model(const RunConfig& cfg) {
  CalibrationModel truth;
  const auto& a = cfg.sensor_a_true;
  truth.A(0, 0) = a[0];
  truth.A(0, 1) = a[1];
  truth.A(0, 2) = a[2];
  truth.A(1, 0) = a[3];
  truth.A(1, 1) = a[4];
  truth.A(1, 2) = a[5];
  truth.A(1, 3) = a[6];
  truth.A(2, 2) = a[7];
  truth.Z = to_vec3(cfg.sensor_z_true);
  truth.fitted = true;
  return truth;
}

}  // namespace

ExperimentAssets build_assets(const RunConfig& cfg) {
  ExperimentAssets a;
  a.chain = load_chain_file(cfg.chain_file);

  a.line = make_insertion_line(to_vec3(cfg.line_start), deg2rad(cfg.decline_deg),
                               cfg.line_length);

  IkParams ik;
  ik.damping = cfg.ik_damping;
  ik.max_iters = cfg.ik_max_iters;
  ik.pos_tol = cfg.ik_pos_tol;
  ik.nullspace_gain = cfg.ik_nullspace_gain;
  ik.max_step = cfg.ik_max_step;
  ik.nominal_posture = to_vec7(cfg.nominal_posture);
  a.waypoints = solve_waypoints(a.chain, a.line, cfg.waypoints, ik);
  a.path = fit_splines(a.waypoints, 1.0, cfg.total_duration_s);

  a.scene_local = load_scene_file(cfg.scene_file);
  a.scene_local.validate(cfg.swab_radius);

  // Unperturbed nostril frame: local +z along the insertion direction,
  // origin one standoff past the swab tip's start position.
  const Vec3 tip_start = a.line.start.position + cfg.swab_length * a.line.direction;
  Iso3 entry = Iso3::Identity();
  Mat3 r;
  r.col(2) = a.line.direction;
  r.col(1) = Vec3::UnitY();
  r.col(0) = r.col(1).cross(r.col(2));
  entry.linear() = r;
  entry.translation() = tip_start + cfg.standoff_m * a.line.direction;
  a.entry_frame = entry;

  // Synthetic gravity calibration, averaged no-load samples per orientation.
  a.sensor_truth = ground_truth_model(cfg);
  Rng rng = Rng(cfg.master_seed).child(0xca11b);
  const double sigma = cfg.calibration_noise ? cfg.sensor_noise_sigma : 0.0;
  const int per = std::max(1, cfg.calibration_samples);
  for (std::size_t i = 0; i + 2 < cfg.calibration_orientations.size(); i += 3) {
    CalibrationSample s;
    s.orientation.o = Vec3(cfg.calibration_orientations[i], cfg.calibration_orientations[i + 1],
                           cfg.calibration_orientations[i + 2])
                          .normalized();
    Vec3 mean = Vec3::Zero();
    for (int k = 0; k < per; ++k)
      mean += sense_raw(a.sensor_truth, Vec3::Zero(), s.orientation, sigma, rng,
                        cfg.sensor_capacity)
                  .f_net;
    s.mean_f_net = mean / per;
    s.sample_count = per;
    a.calibration_samples.push_back(s);
  }
  a.sensor_fit = calibrate(a.calibration_samples);
  return a;
}

Iso3 perturbed_scene_pose(const Iso3& entry_frame, const Vec3& translation, const Vec3& rpy) {
  Iso3 local = Iso3::Identity();
  local.translation() = translation;
  local.linear() = (Eigen::AngleAxisd(rpy[2], Vec3::UnitZ()) *
                    Eigen::AngleAxisd(rpy[1], Vec3::UnitY()) *
                    Eigen::AngleAxisd(rpy[0], Vec3::UnitX()))
                       .toRotationMatrix();
  return entry_frame * local;
}

TrialSetup make_trial_setup(const RunConfig& cfg, const ExperimentAssets& assets,
                            ControlMode mode, const Iso3& scene_pose, std::uint64_t seed) {
  TrialSetup s;
  s.chain = &assets.chain;
  s.gains.kp = to_vec7(cfg.kp);
  s.gains.kd = to_vec7(cfg.kd);
  s.gains.lambda = to_vec3(cfg.lambda);
  s.gains.mode = mode;
  s.gains.torque_limit = assets.chain.torque_limits();
  s.observer.fbar_z = cfg.fbar_z;
  s.observer.nu_f = cfg.nu_f;
  s.observer.epsbar = cfg.epsbar;
  s.observer.nu_eps = cfg.nu_eps;
  s.observer.threshold = cfg.term_threshold;
  s.progress.nu_s = cfg.nu_s;
  s.progress.sbar_f = cfg.sbar_f;
  s.progress.rate_scale = assets.path.duration_scale();
  s.path = assets.path;
  s.scene = assets.scene_local;
  s.scene.pose = scene_pose;
  s.phantom_enabled = cfg.scene_enabled;
  s.swab.segments = cfg.swab_segments;
  s.swab.length = cfg.swab_length;
  s.swab.radius = cfg.swab_radius;
  s.swab.flexural_rigidity = cfg.swab_rigidity;
  s.swab.max_iters = cfg.swab_max_iters;
  s.swab.tol_move = cfg.swab_tol_move;
  s.swab.tol_force = cfg.swab_tol_force;
  s.sensor_truth = assets.sensor_truth;
  s.sensor_fit = assets.sensor_fit;
  s.sensor_noise_sigma = cfg.sensor_noise_sigma;
  s.sensor_capacity = cfg.sensor_capacity;
  s.filter_alpha = cfg.filter_alpha;
  s.engine.control_rate_hz = cfg.control_rate_hz;
  s.engine.substeps = cfg.substeps;
  s.engine.sensor_rate_hz = cfg.sensor_rate_hz;
  s.engine.timeout_s = cfg.timeout_s;
  s.engine.max_joint_speed = cfg.max_joint_speed;
  s.seed = seed;
  return s;
}

std::uint64_t pairing_hash(const RunConfig& cfg, const Iso3& scene_pose) {
  RunConfig masked = cfg;
  masked.mode = "<paired>";
  std::ostringstream blob;
  blob << masked.to_config().dump();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) blob << "," << format_double(scene_pose.matrix()(r, c));
  std::uint64_t h = 1469598103934665603ULL;
  for (const char ch : blob.str()) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace swabsim

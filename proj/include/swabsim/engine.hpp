#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swabsim/chain.hpp"
#include "swabsim/controller.hpp"
#include "swabsim/filter.hpp"
#include "swabsim/loadcell.hpp"
#include "swabsim/observer.hpp"
#include "swabsim/phantom.hpp"
#include "swabsim/planner.hpp"
#include "swabsim/rng.hpp"

namespace swabsim {

struct EngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EngineConfig {
  double control_rate_hz = 1000.0;
  int substeps = 4;             // semi-implicit Euler substeps per tick
  double sensor_rate_hz = 80.0; // loadcell sample-and-hold rate
  double timeout_s = 60.0;
  double max_joint_speed = 20.0;  // rad/s, divergence guard

  void validate() const {
    if (!(control_rate_hz > 0) || !(sensor_rate_hz > 0) || !(timeout_s > 0) || substeps < 1)
      throw EngineError("engine: rates, timeout and substeps must be positive");
  }
};

// TickRow flag bits.
enum TickFlag : std::uint32_t {
  kFlagSensorOverload = 1u << 0,
  kFlagTorqueSaturated = 1u << 1,
  kFlagStaleEquilibrium = 1u << 2,
  kFlagJointLimitClamp = 1u << 3,
  kFlagPathEnd = 1u << 4,
  kFlagContact = 1u << 5,
};

/// One control tick of the trial time series.
struct TickRow {
  double t = 0.0;
  Vec7 q = Vec7::Zero();
  Vec7 qd = Vec7::Zero();
  Vec7 tau = Vec7::Zero();
  Vec3 f_raw = Vec3::Zero();    // held raw loadcell reading F_net
  Vec3 f_comp = Vec3::Zero();   // gravity/bias compensated
  Vec3 f_filt = Vec3::Zero();   // low-pass output fed to the controller
  double s = 0.0;
  double sdot = 0.0;            // s-units per second, actual
  double eps = 0.0;             // m
  double p_f = 0.0, p_eps = 0.0, p_term = 0.0;
  Vec3 tip = Vec3::Zero();
  std::uint32_t flags = 0;
};

struct TrialSetup {
  const KinematicChain* chain = nullptr;  // plant; also the controller model
  const KinematicChain* controller_chain = nullptr;  // defaults to `chain`
  ControllerGains gains;
  ObserverParams observer;
  ProgressParams progress;  // rate_scale normally = path.duration_scale()
  SplinePath path;
  PhantomScene scene;
  bool phantom_enabled = true;
  SwabParams swab;
  CalibrationModel sensor_truth;  // contamination ground truth
  CalibrationModel sensor_fit;    // fitted compensation model
  double sensor_noise_sigma = 1e-3;  // N
  double sensor_capacity = 10.0;     // N
  double filter_alpha = 1.0;
  EngineConfig engine;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrialResult {
  std::vector<TickRow> log;
  Outcome outcome = Outcome::kMistracked;
  bool terminated = false;   // observer fired
  bool timed_out = false;
  double duration_s = 0.0;
  int termination_tick = -1;
  double mean_force_n = 0.0;  // mean of |f_filt| over the insertion
  double peak_force_n = 0.0;
  double final_eps = 0.0;
  double final_s = 0.0;
  EePose final_pose;
  double displacement_from_nominal_m = 0.0;   // actual vs nominal FK at final s
  double rotation_from_nominal_rad = 0.0;
  int stale_ticks = 0;
  int saturated_ticks = 0;
  int overload_ticks = 0;
  int limit_clamp_ticks = 0;
  std::string fault;  // non-empty when a controller fault aborted the trial
};

/// One semi-implicit Euler substep of the arm under a held total torque.
/// Joint limits clamp position and zero the outward velocity; returns true
/// when a clamp fired.
bool plant_substep(const KinematicChain& chain, Vec7& q, Vec7& qd, const Vec7& tau_total,
                   double dt);

/// Run one deterministic closed-loop insertion trial.
TrialResult run_trial(const TrialSetup& setup);

/// CSV dump of the tick log; stride > 1 subsamples rows (the first and the
/// final tick are always written).
std::string ticklog_csv(const std::vector<TickRow>& log, int stride = 1);

}  // namespace swabsim

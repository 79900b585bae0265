#include "swabsim/engine.hpp"

#include <sstream>

#include "swabsim/config.hpp"

namespace swabsim {

void TrialSetup::validate() const {
  if (!chain) throw EngineError("engine: no kinematic chain");
  engine.validate();
  gains.validate();
  observer.validate();
  if (path.segments() < 1) throw EngineError("engine: empty spline path");
  if (!(filter_alpha >= 0)) throw EngineError("engine: filter alpha must be >= 0");
  if (!sensor_fit.fitted) throw EngineError("engine: sensor compensation model not fitted");
  if (phantom_enabled) scene.validate(swab.radius);
  if (controller_chain && controller_chain != chain) {
    // Model-perturbation studies are allowed; structure must still agree.
    controller_chain->validate();
  }
}

bool plant_substep(const KinematicChain& chain, Vec7& q, Vec7& qd, const Vec7& tau_total,
                   double dt) {
  const LinkFrames frames = compute_frames(chain, q);
  const Vec7 qdd = forward_dynamics(chain, frames, qd, tau_total);
  qd += dt * qdd;
  q += dt * qd;
  bool clamped = false;
  for (int j = 0; j < KinematicChain::kJoints; ++j) {
    if (q[j] < chain.links[j].lower) {
      q[j] = chain.links[j].lower;
      if (qd[j] < 0) qd[j] = 0;
      clamped = true;
    } else if (q[j] > chain.links[j].upper) {
      q[j] = chain.links[j].upper;
      if (qd[j] > 0) qd[j] = 0;
      clamped = true;
    }
  }
  return clamped;
}

TrialResult run_trial(const TrialSetup& setup) {
  setup.validate();
  const KinematicChain& plant = *setup.chain;
  const KinematicChain& model = setup.controller_chain ? *setup.controller_chain : plant;

  const double dt = 1.0 / setup.engine.control_rate_hz;
  const double sub_dt = dt / setup.engine.substeps;
  const long max_ticks =
      std::max<long>(1, static_cast<long>(setup.engine.timeout_s * setup.engine.control_rate_hz));

  Rng rng(setup.seed);
  Rng sensor_rng = rng.child(0x5e50);

  TrialResult res;
  res.log.reserve(std::min<long>(max_ticks, 1 << 20));

  // Start at the first waypoint, at rest.
  Vec7 q = setup.path.eval(0.0).q;
  Vec7 qd = Vec7::Zero();

  LinkFrames frames = compute_frames(plant, q);
  TerminationObserver observer(setup.observer, frames.sensor.translation());
  ForceFilter filter(setup.filter_alpha);
  ProgressState progress;
  SwabState swab_state;

  // Loadcell sample-and-hold: sample k fires at the first tick with
  // t >= k / sensor_rate.
  long sensor_samples = 0;
  Vec3 raw_held = Vec3::Zero();
  OrientationEncoding o_held;
  bool overload_held = false;

  const bool baseline = setup.gains.mode == ControlMode::kBaseline;

  for (long tick = 0; tick < max_ticks; ++tick) {
    const double t = static_cast<double>(tick) * dt;
    TickRow row;
    row.t = t;
    row.q = q;
    row.qd = qd;

    // (1) Swab equilibrium and contact at the current end-effector pose.
    ContactResult contact;
    if (setup.phantom_enabled) {
      contact = relax_swab(setup.scene, setup.swab, frames.sensor, swab_state);
      if (!contact.converged) {
        row.flags |= kFlagStaleEquilibrium;
        ++res.stale_ticks;
      }
      if (contact.world_force_sum.squaredNorm() > 0) row.flags |= kFlagContact;
    } else {
      const Vec3 axis = -frames.sensor.linear().col(2);
      contact.tip_position = frames.sensor.translation() + setup.swab.length * axis;
    }
    row.tip = contact.tip_position;

    // (2) Loadcell sampling at the sensor rate, held between samples. The
    // cell sees the external force applied to the swab, in its own frame.
    if (static_cast<double>(tick) * setup.engine.sensor_rate_hz >=
        static_cast<double>(sensor_samples) * setup.engine.control_rate_hz) {
      const Vec3 f_true = frames.sensor.linear().transpose() * contact.world_force_sum;
      o_held = OrientationEncoding::from_sensor_rotation(frames.sensor.linear(), plant.gravity);
      const RawReading reading = sense_raw(setup.sensor_truth, f_true, o_held,
                                           setup.sensor_noise_sigma, sensor_rng,
                                           setup.sensor_capacity);
      raw_held = reading.f_net;
      overload_held = reading.overload;
      ++sensor_samples;
    }
    row.f_raw = raw_held;
    if (overload_held) {
      row.flags |= kFlagSensorOverload;
      ++res.overload_ticks;
    }

    // (3) Gravity/bias compensation, (4) low-pass filter.
    row.f_comp = compensate(setup.sensor_fit, raw_held, o_held);
    row.f_filt = filter.step(row.f_comp, dt);

    // (5) Path progression; the baseline ignores force here.
    const double rate =
        baseline ? 1.0 : progression_rate(setup.progress, row.f_filt.z());
    const double s_prev = progress.s;
    progress.s = std::min(progress.s + dt * setup.progress.rate_scale * rate,
                          setup.path.s_max());
    if (progress.s >= setup.path.s_max()) {
      progress.saturated = true;
      row.flags |= kFlagPathEnd;
    }
    row.s = progress.s;
    row.sdot = (progress.s - s_prev) / dt;

    // (6) Nominal waypoints; feedforward scaled to the actual progression
    // rate so the perfect-model law tracks exactly. Hold at the path end.
    SplinePath::Sample nominal = setup.path.eval(progress.s);
    const double ff = progress.saturated ? 0.0 : rate;
    nominal.qd *= ff;
    nominal.qdd *= ff * ff;

    // (7) Torque command.
    TorqueCommand cmd;
    try {
      cmd = control_tick(model, setup.gains, q, qd, nominal.q, nominal.qd, nominal.qdd,
                         row.f_filt);
    } catch (const ControllerFault& e) {
      res.fault = e.what();
      res.outcome = Outcome::kDiverged;
      res.log.push_back(row);
      break;
    }
    row.tau = cmd.tau;
    if (cmd.saturated) {
      row.flags |= kFlagTorqueSaturated;
      ++res.saturated_ticks;
    }

    // (8) Plant integration, semi-implicit Euler with the swab reaction as
    // an external torque held over the tick.
    const Vec7 tau_ext =
        position_jacobian_world(plant, frames).transpose() * contact.world_force_sum;
    const Vec7 tau_total = cmd.tau + tau_ext;
    bool clamped = false;
    for (int sub = 0; sub < setup.engine.substeps; ++sub)
      clamped = plant_substep(plant, q, qd, tau_total, sub_dt) || clamped;
    if (clamped) {
      row.flags |= kFlagJointLimitClamp;
      ++res.limit_clamp_ticks;
    }

    if (!q.allFinite() || !qd.allFinite() ||
        qd.lpNorm<Eigen::Infinity>() > setup.engine.max_joint_speed) {
      res.outcome = Outcome::kDiverged;
      res.log.push_back(row);
      break;
    }

    frames = compute_frames(plant, q);

    // (9) Termination observer on the post-step pose.
    const ObserverDecision d = observer.observe(row.f_filt.z(), frames.sensor.translation());
    row.eps = d.eps;
    row.p_f = d.p_f;
    row.p_eps = d.p_eps;
    row.p_term = d.p_term;
    res.log.push_back(row);

    if (d.terminate) {
      res.terminated = true;
      res.termination_tick = static_cast<int>(tick);
      break;
    }
  }

  const TickRow& last = res.log.back();
  res.duration_s = last.t + dt;
  res.timed_out = !res.terminated && res.fault.empty() &&
                  static_cast<long>(res.log.size()) == max_ticks;
  res.final_eps = last.eps;
  res.final_s = last.s;
  res.final_pose = EePose::from_isometry(frames.sensor);

  double peak = 0.0, mean = 0.0;
  for (const auto& r : res.log) {
    const double f = r.f_filt.norm();
    peak = std::max(peak, f);
    mean += f;
  }
  res.mean_force_n = mean / static_cast<double>(res.log.size());
  res.peak_force_n = peak;

  // Final pose vs the unaltered nominal trajectory at the same s.
  const Vec7 q_nom = setup.path.eval(last.s).q;
  const Iso3 nominal_pose = compute_frames(plant, q_nom).sensor;
  res.displacement_from_nominal_m =
      (res.final_pose.position - nominal_pose.translation()).norm();
  res.rotation_from_nominal_rad =
      rotation_distance(res.final_pose.orientation.toRotationMatrix(), nominal_pose.linear());

  if (res.outcome != Outcome::kDiverged) {
    if (setup.phantom_enabled) {
      res.outcome = classify_outcome(setup.scene, last.tip, res.final_eps, res.terminated);
    } else {
      res.outcome = res.terminated ? Outcome::kSuccess : Outcome::kMistracked;
    }
  }
  return res;
}

std::string ticklog_csv(const std::vector<TickRow>& log, int stride) {
  if (stride < 1) stride = 1;
  std::ostringstream out;
  out << "t";
  for (int j = 1; j <= 7; ++j) out << ",q" << j;
  for (int j = 1; j <= 7; ++j) out << ",qd" << j;
  for (int j = 1; j <= 7; ++j) out << ",tau" << j;
  out << ",fraw_x,fraw_y,fraw_z,fcomp_x,fcomp_y,fcomp_z,f_x,f_y,f_z";
  out << ",s,sdot,eps,p_f,p_eps,p_term,tip_x,tip_y,tip_z,flags\n";

  auto write_row = [&out](const TickRow& r) {
    out << format_double(r.t);
    for (int j = 0; j < 7; ++j) out << "," << format_double(r.q[j]);
    for (int j = 0; j < 7; ++j) out << "," << format_double(r.qd[j]);
    for (int j = 0; j < 7; ++j) out << "," << format_double(r.tau[j]);
    for (int j = 0; j < 3; ++j) out << "," << format_double(r.f_raw[j]);
    for (int j = 0; j < 3; ++j) out << "," << format_double(r.f_comp[j]);
    for (int j = 0; j < 3; ++j) out << "," << format_double(r.f_filt[j]);
    out << "," << format_double(r.s) << "," << format_double(r.sdot) << ","
        << format_double(r.eps) << "," << format_double(r.p_f) << "," << format_double(r.p_eps)
        << "," << format_double(r.p_term) << "," << format_double(r.tip.x()) << ","
        << format_double(r.tip.y()) << "," << format_double(r.tip.z()) << "," << r.flags << "\n";
  };

  const long n = static_cast<long>(log.size());
  for (long i = 0; i < n; i += stride) write_row(log[i]);
  if (n > 0 && (n - 1) % stride != 0) write_row(log.back());
  return out.str();
}

}  // namespace swabsim

#include "swabsim/harness.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "swabsim/svg.hpp"

namespace swabsim {

namespace {

const char* mode_name(ControlMode m) {
  return m == ControlMode::kForceFeedback ? "feedback" : "baseline";
}

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

TrialRecord to_record(int pair, ControlMode mode, const Vec3& t, const Vec3& rpy,
                      const TrialResult& res, std::uint64_t hash, const std::string& log_path) {
  TrialRecord r;
  r.pair = pair;
  r.mode = mode;
  r.perturb_translation = t;
  r.perturb_rpy = rpy;
  r.outcome = res.outcome;
  r.terminated = res.terminated;
  r.mean_force_mn = res.mean_force_n * 1e3;
  r.peak_force_mn = res.peak_force_n * 1e3;
  r.duration_s = res.duration_s;
  r.termination_tick = res.termination_tick;
  r.final_eps_m = res.final_eps;
  r.displacement_from_nominal_mm = res.displacement_from_nominal_m * 1e3;
  r.rotation_from_nominal_deg = rad2deg(res.rotation_from_nominal_rad);
  r.stale_ticks = res.stale_ticks;
  r.pairing_hash = hash;
  r.ticklog_path = log_path;
  return r;
}

}  // namespace

void write_pair_plot(const std::string& path_prefix, const TrialResult& feedback,
                     const TrialResult& baseline, const Vec3& insertion_dir,
                     const Vec3& start_position, int stride) {
  (void)start_position;
  auto force_series = [&](const TrialResult& r, std::vector<double>& t, std::vector<double>& f) {
    for (std::size_t i = 0; i < r.log.size(); i += stride) {
      t.push_back(r.log[i].t);
      f.push_back(r.log[i].f_filt.norm());
    }
  };
  auto disp_series = [&](const TrialResult& r, std::vector<double>& t, std::vector<double>& d) {
    // Displacement of the swab tip along the insertion axis from its start.
    if (r.log.empty()) return;
    const Vec3 tip0 = r.log.front().tip;
    for (std::size_t i = 0; i < r.log.size(); i += stride) {
      t.push_back(r.log[i].t);
      d.push_back((r.log[i].tip - tip0).dot(insertion_dir) * 1e3);
    }
  };

  SvgPlot force_plot("filtered force magnitude", "t [s]", "|f| [N]");
  std::vector<double> t1, f1, t2, f2;
  force_series(feedback, t1, f1);
  force_series(baseline, t2, f2);
  force_plot.add_series("force-feedback", "#c62828", std::move(t1), std::move(f1));
  force_plot.add_series("baseline", "#1565c0", std::move(t2), std::move(f2));
  force_plot.write(path_prefix + "_force.svg");

  SvgPlot disp_plot("displacement along the insertion axis", "t [s]", "displacement [mm]");
  std::vector<double> t3, d3, t4, d4;
  disp_series(feedback, t3, d3);
  disp_series(baseline, t4, d4);
  disp_plot.add_series("force-feedback", "#c62828", std::move(t3), std::move(d3));
  disp_plot.add_series("baseline", "#1565c0", std::move(t4), std::move(d4));
  disp_plot.write(path_prefix + "_displacement.svg");
}

ExperimentResult run_experiment(const RunConfig& cfg, const ExperimentAssets& assets,
                                const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "trials");
  fs::create_directories(fs::path(out_dir) / "plots");

  struct PairOutcome {
    Vec3 translation = Vec3::Zero();
    Vec3 rpy = Vec3::Zero();
    TrialRecord feedback, baseline;
  };
  std::vector<PairOutcome> pairs(cfg.pairs);

  const Rng master(cfg.master_seed);
  const double tb = cfg.perturb_trans_mm * 1e-3;
  const double rb = deg2rad(cfg.perturb_rot_deg);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int pair = next.fetch_add(1);
      if (pair >= cfg.pairs) return;
      PairOutcome& po = pairs[pair];

      Rng pr = master.child(0x9a17 + static_cast<std::uint64_t>(pair));
      po.translation =
          Vec3(pr.uniform(-tb, tb), pr.uniform(-tb, tb), pr.uniform(-tb, tb));
      po.rpy = Vec3(pr.uniform(-rb, rb), pr.uniform(-rb, rb), pr.uniform(-rb, rb));
      const Iso3 pose = perturbed_scene_pose(assets.entry_frame, po.translation, po.rpy);
      const std::uint64_t hash = pairing_hash(cfg, pose);

      TrialResult results[2];
      for (const ControlMode mode : {ControlMode::kForceFeedback, ControlMode::kBaseline}) {
        const bool is_baseline = mode == ControlMode::kBaseline;
        const std::uint64_t seed = splitmix64(
            cfg.master_seed ^ (static_cast<std::uint64_t>(pair) << 8) ^ (is_baseline ? 1u : 0u));
        TrialSetup setup = make_trial_setup(cfg, assets, mode, pose, seed);
        TrialResult& res = results[is_baseline ? 1 : 0];
        res = run_trial(setup);

        char name[64];
        std::snprintf(name, sizeof(name), "pair%03d_%s.csv", pair, mode_name(mode));
        const std::string rel = std::string("trials/") + name;
        {
          std::ofstream out(fs::path(out_dir) / rel);
          out << ticklog_csv(res.log, cfg.plan_log_stride);
        }
        (is_baseline ? po.baseline : po.feedback) =
            to_record(pair, mode, po.translation, po.rpy, res, hash, rel);
      }

      // Paired Fig.-8 style traces for the first few pairs.
      if (pair < cfg.plot_pairs) {
        char prefix[64];
        std::snprintf(prefix, sizeof(prefix), "plots/pair%03d", pair);
        write_pair_plot((fs::path(out_dir) / prefix).string(), results[0], results[1],
                        assets.line.direction, assets.line.start.position,
                        std::max(1, cfg.plan_log_stride));
      }
    }
  };

  int jobs = cfg.jobs > 0 ? cfg.jobs
                          : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min(jobs, cfg.pairs);
  std::vector<std::thread> threads;
  for (int i = 1; i < jobs; ++i) threads.emplace_back(worker);
  worker();
  for (auto& th : threads) th.join();

  ExperimentResult out;
  out.out_dir = out_dir;
  for (const auto& po : pairs) {
    out.records.push_back(po.feedback);
    out.records.push_back(po.baseline);
  }
  return out;
}

Report summarize(const std::vector<TrialRecord>& records) {
  Report rep;
  std::vector<double> fb_avg, bl_avg, fb_peak, bl_peak;
  for (const auto& r : records) {
    const bool fb = r.mode == ControlMode::kForceFeedback;
    const bool success = r.outcome == Outcome::kSuccess;
    rep.contingency.counts[fb ? 0 : 1][success ? 0 : 1] += 1;
    if (fb) {
      fb_avg.push_back(r.mean_force_mn);
      fb_peak.push_back(r.peak_force_mn);
      rep.mean_displacement_feedback_mm += r.displacement_from_nominal_mm;
      rep.mean_rotation_feedback_deg += r.rotation_from_nominal_deg;
      if (r.outcome == Outcome::kWedged) ++rep.wedged_feedback;
      if (r.outcome == Outcome::kMistracked) ++rep.mistracked_feedback;
      if (r.outcome == Outcome::kDiverged) ++rep.diverged_feedback;
    } else {
      bl_avg.push_back(r.mean_force_mn);
      bl_peak.push_back(r.peak_force_mn);
      rep.mean_displacement_baseline_mm += r.displacement_from_nominal_mm;
      rep.mean_rotation_baseline_deg += r.rotation_from_nominal_deg;
      if (r.outcome == Outcome::kWedged) ++rep.wedged_baseline;
      if (r.outcome == Outcome::kMistracked) ++rep.mistracked_baseline;
      if (r.outcome == Outcome::kDiverged) ++rep.diverged_baseline;
    }
  }
  const double nf = rep.contingency.row_total(0);
  const double nb = rep.contingency.row_total(1);
  rep.pairs = static_cast<int>(std::min(fb_avg.size(), bl_avg.size()));
  if (nf > 0) {
    rep.success_rate_feedback = rep.contingency.counts[0][0] / nf;
    rep.mean_displacement_feedback_mm /= nf;
    rep.mean_rotation_feedback_deg /= nf;
  }
  if (nb > 0) {
    rep.success_rate_baseline = rep.contingency.counts[1][0] / nb;
    rep.mean_displacement_baseline_mm /= nb;
    rep.mean_rotation_baseline_deg /= nb;
  }

  try {
    rep.chi_square = chi_square_2x2(rep.contingency);
  } catch (const StatsError& e) {
    rep.chi_square_note = std::string("not applicable (") + e.what() + ")";
  }

  auto stats_of = [](const std::vector<double>& v, double& mean, double& sd) {
    if (v.empty()) return;
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0;
  };
  stats_of(fb_avg, rep.feedback_stats.mean_avg_mn, rep.feedback_stats.sd_avg_mn);
  stats_of(fb_peak, rep.feedback_stats.mean_peak_mn, rep.feedback_stats.sd_peak_mn);
  stats_of(bl_avg, rep.baseline_stats.mean_avg_mn, rep.baseline_stats.sd_avg_mn);
  stats_of(bl_peak, rep.baseline_stats.mean_peak_mn, rep.baseline_stats.sd_peak_mn);

  if (rep.pairs >= 2) {
    fb_avg.resize(rep.pairs);
    bl_avg.resize(rep.pairs);
    fb_peak.resize(rep.pairs);
    bl_peak.resize(rep.pairs);
    try {
      rep.avg_force_test = paired_t_test(fb_avg, bl_avg);
    } catch (const StatsError&) {
    }
    try {
      rep.peak_force_test = paired_t_test(fb_peak, bl_peak);
    } catch (const StatsError&) {
    }
  }
  return rep;
}

std::string Report::to_text() const {
  std::ostringstream o;
  o << "paired insertion experiment summary\n";
  o << "===================================\n\n";
  o << "trials: " << contingency.row_total(0) << " force-feedback, " << contingency.row_total(1)
    << " baseline\n\n";
  o << "outcome contingency (success / failure)\n";
  o << "  force-feedback: " << contingency.counts[0][0] << " / " << contingency.counts[0][1]
    << "\n";
  o << "  baseline:       " << contingency.counts[1][0] << " / " << contingency.counts[1][1]
    << "\n";
  o << "success rates: force-feedback " << two_decimals(100.0 * success_rate_feedback)
    << "%, baseline " << two_decimals(100.0 * success_rate_baseline) << "%\n";
  if (chi_square) {
    o << "chi-square: statistic = " << sci(chi_square->statistic)
      << ", p-value = " << sci(chi_square->p_value) << "\n";
  } else {
    o << "chi-square: " << chi_square_note << "\n";
  }
  o << "\nforces (mN)\n";
  o << "  avg force:  feedback " << two_decimals(feedback_stats.mean_avg_mn) << " +- "
    << two_decimals(feedback_stats.sd_avg_mn) << ", baseline "
    << two_decimals(baseline_stats.mean_avg_mn) << " +- "
    << two_decimals(baseline_stats.sd_avg_mn);
  if (avg_force_test) o << ", paired t p = " << sci(avg_force_test->p_value);
  o << "\n";
  o << "  peak force: feedback " << two_decimals(feedback_stats.mean_peak_mn) << " +- "
    << two_decimals(feedback_stats.sd_peak_mn) << ", baseline "
    << two_decimals(baseline_stats.mean_peak_mn) << " +- "
    << two_decimals(baseline_stats.sd_peak_mn);
  if (peak_force_test) o << ", paired t p = " << sci(peak_force_test->p_value);
  o << "\n";
  o << "\nfinal pose vs nominal trajectory\n";
  o << "  feedback: " << two_decimals(mean_displacement_feedback_mm) << " mm, "
    << two_decimals(mean_rotation_feedback_deg) << " deg\n";
  o << "  baseline: " << two_decimals(mean_displacement_baseline_mm) << " mm, "
    << two_decimals(mean_rotation_baseline_deg) << " deg\n";
  o << "\nfailure modes\n";
  o << "  wedged:     feedback " << wedged_feedback << ", baseline " << wedged_baseline << "\n";
  o << "  mistracked: feedback " << mistracked_feedback << ", baseline " << mistracked_baseline
    << "\n";
  o << "  diverged:   feedback " << diverged_feedback << ", baseline " << diverged_baseline
    << "\n";
  return o.str();
}

std::string Report::tables_csv() const {
  std::ostringstream o;
  o << "table,row,success,failure\n";
  o << "contingency,force-feedback," << contingency.counts[0][0] << ","
    << contingency.counts[0][1] << "\n";
  o << "contingency,baseline," << contingency.counts[1][0] << "," << contingency.counts[1][1]
    << "\n\n";
  o << "metric,feedback_mean,feedback_sd,baseline_mean,baseline_sd,p_value\n";
  o << "avg_force_mn," << format_double(feedback_stats.mean_avg_mn) << ","
    << format_double(feedback_stats.sd_avg_mn) << "," << format_double(baseline_stats.mean_avg_mn)
    << "," << format_double(baseline_stats.sd_avg_mn) << ","
    << (avg_force_test ? format_double(avg_force_test->p_value) : "nan") << "\n";
  o << "peak_force_mn," << format_double(feedback_stats.mean_peak_mn) << ","
    << format_double(feedback_stats.sd_peak_mn) << ","
    << format_double(baseline_stats.mean_peak_mn) << ","
    << format_double(baseline_stats.sd_peak_mn) << ","
    << (peak_force_test ? format_double(peak_force_test->p_value) : "nan") << "\n";
  return o.str();
}

std::string records_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream o;
  o << "pair,mode,outcome,terminated,perturb_tx_m,perturb_ty_m,perturb_tz_m,perturb_rx_rad,"
       "perturb_ry_rad,perturb_rz_rad,mean_force_mn,peak_force_mn,duration_s,termination_tick,"
       "final_eps_m,displacement_from_nominal_mm,rotation_from_nominal_deg,stale_ticks,"
       "pairing_hash,ticklog\n";
  for (const auto& r : records) {
    o << r.pair << "," << mode_name(r.mode) << "," << outcome_name(r.outcome) << ","
      << (r.terminated ? 1 : 0) << "," << format_double(r.perturb_translation.x()) << ","
      << format_double(r.perturb_translation.y()) << ","
      << format_double(r.perturb_translation.z()) << "," << format_double(r.perturb_rpy.x())
      << "," << format_double(r.perturb_rpy.y()) << "," << format_double(r.perturb_rpy.z()) << ","
      << format_double(r.mean_force_mn) << "," << format_double(r.peak_force_mn) << ","
      << format_double(r.duration_s) << "," << r.termination_tick << ","
      << format_double(r.final_eps_m) << "," << format_double(r.displacement_from_nominal_mm)
      << "," << format_double(r.rotation_from_nominal_deg) << "," << r.stale_ticks << ","
      << r.pairing_hash << "," << r.ticklog_path << "\n";
  }
  return o.str();
}

}  // namespace swabsim

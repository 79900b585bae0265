#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swabsim/engine.hpp"
#include "swabsim/runconfig.hpp"
#include "swabsim/stats.hpp"

namespace swabsim {

/// Summary of one insertion trial, one row of the experiment record table.
struct TrialRecord {
  int pair = 0;
  ControlMode mode = ControlMode::kForceFeedback;
  Vec3 perturb_translation = Vec3::Zero();  // m, nostril-local
  Vec3 perturb_rpy = Vec3::Zero();          // rad
  Outcome outcome = Outcome::kMistracked;
  bool terminated = false;
  double mean_force_mn = 0.0;
  double peak_force_mn = 0.0;
  double duration_s = 0.0;
  int termination_tick = -1;
  double final_eps_m = 0.0;
  double displacement_from_nominal_mm = 0.0;
  double rotation_from_nominal_deg = 0.0;
  int stale_ticks = 0;
  std::uint64_t pairing_hash = 0;
  std::string ticklog_path;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;  // ordered: pair 0 feedback, pair 0 baseline, ...
  std::string out_dir;
};

/// Run the paired experiment: per pair one sampled phantom pose, a
/// force-feedback trial and a baseline trial on the identical scene.
/// Tick logs are written under `out_dir`/trials. Pairs may execute in
/// parallel; results are deterministic and ordered by pair id.
ExperimentResult run_experiment(const RunConfig& cfg, const ExperimentAssets& assets,
                                const std::string& out_dir);

struct ModeForceStats {
  double mean_avg_mn = 0.0, sd_avg_mn = 0.0;
  double mean_peak_mn = 0.0, sd_peak_mn = 0.0;
};

/// Aggregate report: contingency + chi-square, paired force t-tests,
/// displacement metrics and failure-mode counts.
struct Report {
  ContingencyTable contingency;  // rows: feedback, baseline; cols: success, failure
  double success_rate_feedback = 0.0;
  double success_rate_baseline = 0.0;
  std::optional<ChiSquareResult> chi_square;  // empty when a marginal is zero
  std::string chi_square_note;
  std::optional<TTestResult> avg_force_test;
  std::optional<TTestResult> peak_force_test;
  ModeForceStats feedback_stats, baseline_stats;
  double mean_displacement_feedback_mm = 0.0, mean_rotation_feedback_deg = 0.0;
  double mean_displacement_baseline_mm = 0.0, mean_rotation_baseline_deg = 0.0;
  int wedged_feedback = 0, wedged_baseline = 0;
  int mistracked_feedback = 0, mistracked_baseline = 0;
  int diverged_feedback = 0, diverged_baseline = 0;
  int pairs = 0;

  std::string to_text() const;
  std::string tables_csv() const;
};

Report summarize(const std::vector<TrialRecord>& records);

std::string records_csv(const std::vector<TrialRecord>& records);

/// Fig.-8 style paired trace: filtered force magnitude and displacement
/// along the insertion axis over time, both modes overlaid.
void write_pair_plot(const std::string& path_prefix, const TrialResult& feedback,
                     const TrialResult& baseline, const Vec3& insertion_dir,
                     const Vec3& start_position, int stride);

}  // namespace swabsim

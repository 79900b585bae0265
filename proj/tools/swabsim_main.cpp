#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "swabsim/harness.hpp"
#include "swabsim/svg.hpp"

namespace fs = std::filesystem;
using namespace swabsim;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void freeze_config(const RunConfig& cfg, const fs::path& dir) {
  cfg.to_config().write_file((dir / "config_resolved.cfg").string());
  if (fs::exists(cfg.chain_file)) fs::copy_file(cfg.chain_file, dir / "chain.cfg",
                                                fs::copy_options::overwrite_existing);
  if (fs::exists(cfg.scene_file)) fs::copy_file(cfg.scene_file, dir / "scene.cfg",
                                                fs::copy_options::overwrite_existing);
}

int cmd_calibrate(const RunConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const ExperimentAssets assets = build_assets(cfg);
  const CalibrationModel& m = assets.sensor_fit;
  std::cout << "calibration fit over " << assets.calibration_samples.size() << " orientations\n";
  const char* axes = "xyz";
  for (int i = 0; i < 3; ++i)
    std::cout << "  axis " << axes[i] << ": R^2 = " << format_double(m.r_squared[i])
              << ", residual rms = " << format_double(m.residual_rms[i] * 1e3) << " mN\n";
  write_text(fs::path(out_dir) / "calibration_model.txt", m.serialize());
  write_text(fs::path(out_dir) / "calibration_samples.csv",
             calibration_samples_csv(assets.calibration_samples));
  freeze_config(cfg, out_dir);
  std::cout << "wrote " << out_dir << "/calibration_model.txt\n";
  return 0;
}

int cmd_trial(const RunConfig& cfg, const std::string& out_dir, const std::vector<double>& perturb) {
  fs::create_directories(out_dir);
  const ExperimentAssets assets = build_assets(cfg);

  Vec3 t = Vec3::Zero(), rpy = Vec3::Zero();
  if (!perturb.empty()) {
    if (perturb.size() != 6)
      throw std::runtime_error("--perturb needs 6 values: tx ty tz (mm) rx ry rz (deg)");
    t = Vec3(perturb[0], perturb[1], perturb[2]) * 1e-3;
    rpy = Vec3(deg2rad(perturb[3]), deg2rad(perturb[4]), deg2rad(perturb[5]));
  }
  const Iso3 pose = perturbed_scene_pose(assets.entry_frame, t, rpy);
  const ControlMode mode =
      cfg.mode == "baseline" ? ControlMode::kBaseline : ControlMode::kForceFeedback;
  TrialSetup setup = make_trial_setup(cfg, assets, mode, pose, splitmix64(cfg.master_seed));
  const TrialResult res = run_trial(setup);

  write_text(fs::path(out_dir) / "ticklog.csv", ticklog_csv(res.log, cfg.log_stride));
  write_pair_plot((fs::path(out_dir) / "trace").string(), res, res, assets.line.direction,
                  assets.line.start.position, std::max(1, cfg.log_stride));
  freeze_config(cfg, out_dir);

  std::ostringstream sum;
  sum << "mode: " << cfg.mode << "\n";
  sum << "outcome: " << outcome_name(res.outcome) << "\n";
  sum << "terminated: " << (res.terminated ? "yes" : "no") << "\n";
  sum << "duration_s: " << format_double(res.duration_s) << "\n";
  sum << "final_s: " << format_double(res.final_s) << "\n";
  sum << "final_eps_m: " << format_double(res.final_eps) << "\n";
  sum << "mean_force_mn: " << format_double(res.mean_force_n * 1e3) << "\n";
  sum << "peak_force_mn: " << format_double(res.peak_force_n * 1e3) << "\n";
  sum << "displacement_from_nominal_mm: " << format_double(res.displacement_from_nominal_m * 1e3)
      << "\n";
  sum << "rotation_from_nominal_deg: " << format_double(rad2deg(res.rotation_from_nominal_rad))
      << "\n";
  sum << "stale_ticks: " << res.stale_ticks << "\n";
  sum << "saturated_ticks: " << res.saturated_ticks << "\n";
  if (!res.fault.empty()) sum << "fault: " << res.fault << "\n";
  write_text(fs::path(out_dir) / "summary.txt", sum.str());
  std::cout << sum.str();
  return res.outcome == Outcome::kDiverged ? 2 : 0;
}

int cmd_experiment(const RunConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const ExperimentAssets assets = build_assets(cfg);
  freeze_config(cfg, out_dir);
  write_text(fs::path(out_dir) / "calibration_model.txt", assets.sensor_fit.serialize());

  const ExperimentResult result = run_experiment(cfg, assets, out_dir);
  const Report report = summarize(result.records);

  write_text(fs::path(out_dir) / "records.csv", records_csv(result.records));
  write_text(fs::path(out_dir) / "report.txt", report.to_text());
  write_text(fs::path(out_dir) / "tables.csv", report.tables_csv());
  std::cout << report.to_text();
  std::cout << "wrote " << out_dir << "/report.txt\n";
  return 0;
}

int cmd_figures(const RunConfig& cfg, const std::string& out_dir, std::vector<double> alphas) {
  fs::create_directories(out_dir);
  if (alphas.empty()) alphas = {1.0, 3.0, 5.0};

  // Filter response to a 0.5 N step, exact-hold discretization.
  SvgPlot step("force filter response to a 0.5 N step", "t [s]", "f_z [N]");
  const char* colors[] = {"#c62828", "#1565c0", "#2e7d32", "#6a1b9a", "#ef6c00"};
  const double dt = 1e-3;
  int ci = 0;
  for (double alpha : alphas) {
    ForceFilter filter(alpha);
    std::vector<double> ts, fs;
    ts.push_back(0.0);
    fs.push_back(0.0);
    for (int i = 1; i <= 5000; ++i) {
      filter.step(Vec3(0, 0, 0.5), dt);
      if (i % 10 == 0) {
        ts.push_back(i * dt);
        fs.push_back(filter.f.z());
      }
    }
    step.add_series("alpha = " + format_double(alpha), colors[ci++ % 5], std::move(ts),
                    std::move(fs));
  }
  step.write((fs::path(out_dir) / "filter_step_response.svg").string());

  // Progression-rate profile.
  SvgPlot prog("progression rate vs axial force", "f_z [N]", "sdot (nominal)");
  {
    ProgressParams pp;
    pp.nu_s = cfg.nu_s;
    pp.sbar_f = cfg.sbar_f;
    std::vector<double> x, y;
    for (int i = 0; i <= 400; ++i) {
      const double f = i / 400.0;
      x.push_back(f);
      y.push_back(progression_rate(pp, f));
    }
    prog.add_series("1 - sigmoid(nu_s (f_z - sbar_f))", "#c62828", std::move(x), std::move(y));
  }
  prog.write((fs::path(out_dir) / "progression_rate.svg").string());

  // Termination memberships.
  SvgPlot term("termination memberships", "normalized input", "membership");
  {
    std::vector<double> xf, yf, xe, ye;
    for (int i = 0; i <= 400; ++i) {
      const double f = 0.5 * i / 400.0;
      xf.push_back(f / 0.5);
      yf.push_back(sigmoid(cfg.nu_f * (f - cfg.fbar_z)));
      const double e = 0.2 * i / 400.0;
      xe.push_back(e / 0.2);
      ye.push_back(sigmoid(cfg.nu_eps * (e - cfg.epsbar)));
    }
    term.add_series("p_f over f_z in [0, 0.5] N", "#c62828", std::move(xf), std::move(yf));
    term.add_series("p_eps over eps in [0, 0.2] m", "#1565c0", std::move(xe), std::move(ye));
  }
  term.write((fs::path(out_dir) / "termination_memberships.svg").string());

  std::cout << "wrote figures under " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic nasopharyngeal swab insertion simulator"};
  app.require_subcommand(1);

  std::string config_path = "config/default.cfg";
  std::string out_dir;
  long seed = -1;
  int jobs = -1;
  std::string mode;
  std::vector<double> perturb;
  std::vector<double> alphas;
  bool noise_free = false;
  int pairs = -1;

  app.add_option("--config", config_path, "configuration file")->capture_default_str();
  app.add_option("--seed", seed, "override [plan].master_seed");
  app.add_option("--out", out_dir, "output directory");

  auto* calibrate = app.add_subcommand("calibrate", "run the synthetic gravity calibration");
  calibrate->add_flag("--noise-free", noise_free, "disable sensor noise in the routine");

  auto* trial = app.add_subcommand("trial", "run a single insertion trial");
  trial->add_option("--mode", mode, "feedback | baseline");
  trial->add_option("--perturb", perturb,
                    "phantom pose perturbation: tx ty tz (mm) rx ry rz (deg)")
      ->expected(6);

  auto* experiment = app.add_subcommand("experiment", "run the paired experiment");
  experiment->add_option("--jobs", jobs, "parallel pairs (0 = all cores)");
  experiment->add_option("--pairs", pairs, "override [plan].pairs");

  auto* figures = app.add_subcommand("figures", "regenerate documentation figures");
  figures->add_option("--alphas", alphas, "filter response rates");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = RunConfig::load(config_path);
    if (seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed);
    if (jobs >= 0) cfg.jobs = jobs;
    if (pairs > 0) cfg.pairs = pairs;
    if (!mode.empty()) cfg.mode = mode;
    if (noise_free) cfg.calibration_noise = false;
    cfg.validate();

    if (calibrate->parsed())
      return cmd_calibrate(cfg, out_dir.empty() ? "swabsim_out/calibrate" : out_dir);
    if (trial->parsed()) return cmd_trial(cfg, out_dir.empty() ? "swabsim_out/trial" : out_dir, perturb);
    if (experiment->parsed())
      return cmd_experiment(cfg, out_dir.empty() ? "swabsim_out/experiment" : out_dir);
    if (figures->parsed())
      return cmd_figures(cfg, out_dir.empty() ? "swabsim_out/figures" : out_dir, alphas);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

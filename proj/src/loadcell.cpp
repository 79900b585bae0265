#include "swabsim/loadcell.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <sstream>

#include "swabsim/config.hpp"

namespace swabsim {

RawReading sense_raw(const CalibrationModel& truth, const Vec3& true_force,
                     const OrientationEncoding& orientation, double noise_sigma, Rng& rng,
                     double capacity) {
  if (!orientation.normalized())
    throw CalibrationError("loadcell: orientation encoding must be a unit vector");
  RawReading r;
  r.f_net = true_force + truth.gravity_artifact(orientation) + truth.Z;
  if (noise_sigma > 0.0)
    for (int i = 0; i < 3; ++i) r.f_net[i] += rng.normal(0.0, noise_sigma);
  const double mag = r.f_net.norm();
  if (mag > capacity) {
    r.f_net *= capacity / mag;
    r.overload = true;
  }
  return r;
}

CalibrationModel calibrate(const std::vector<CalibrationSample>& samples) {
  if (samples.size() < 9)
    throw CalibrationError("calibration: need at least 9 samples, got " +
                           std::to_string(samples.size()));
  const int n = static_cast<int>(samples.size());

  CalibrationModel model;
  static const char* axis_name[3] = {"x", "y", "z"};
  static const char* reg_name[4] = {"o_x", "o_y", "o_z", "o_y*o_z"};

  for (int axis = 0; axis < 3; ++axis) {
    std::vector<int> cols;
    for (int c = 0; c < 4; ++c)
      if (CalibrationModel::pattern_allows(axis, c)) cols.push_back(c);
    const int k = static_cast<int>(cols.size());

    MatX design(n, k + 1);  // regressors + intercept
    VecX y(n);
    for (int i = 0; i < n; ++i) {
      if (!samples[i].orientation.normalized())
        throw CalibrationError("calibration: sample " + std::to_string(i) +
                               " orientation is not a unit vector");
      const Vec4 r = gravity_regressors(samples[i].orientation);
      for (int c = 0; c < k; ++c) design(i, c) = r[cols[c]];
      design(i, k) = 1.0;
      y[i] = samples[i].mean_f_net[axis];
    }

    Eigen::JacobiSVD<MatX> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double tol = std::max(1e-10, smax * 1e-10);
    if (svd.singularValues().minCoeff() <= tol) {
      // Name the regressor combination the samples fail to excite.
      const VecX null_dir = svd.matrixV().col(k);
      std::ostringstream msg;
      msg << "calibration: degenerate orientation set for axis " << axis_name[axis]
          << "; unexcited direction:";
      for (int c = 0; c < k; ++c)
        if (std::abs(null_dir[c]) > 1e-6)
          msg << " " << format_double(null_dir[c]) << "*" << reg_name[cols[c]];
      if (std::abs(null_dir[k]) > 1e-6) msg << " " << format_double(null_dir[k]) << "*bias";
      throw CalibrationError(msg.str());
    }

    const VecX beta = svd.solve(y);
    for (int c = 0; c < k; ++c) model.A(axis, cols[c]) = beta[c];
    model.Z[axis] = beta[k];

    const VecX resid = y - design * beta;
    const double ss_res = resid.squaredNorm();
    const double mean = y.mean();
    const double ss_tot = (y.array() - mean).matrix().squaredNorm();
    model.r_squared[axis] = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    model.residual_rms[axis] = std::sqrt(ss_res / n);
  }
  model.fitted = true;
  return model;
}

Vec3 compensate(const CalibrationModel& model, const Vec3& raw, const OrientationEncoding& o) {
  if (!model.fitted) throw CalibrationError("compensate: calibration model not fitted");
  if (!o.normalized()) throw CalibrationError("compensate: orientation encoding must be a unit vector");
  return raw - model.gravity_artifact(o) - model.Z;
}

std::string CalibrationModel::serialize() const {
  std::ostringstream out;
  out << "# loadcell calibration model\n";
  out << "A =";
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) out << " " << format_double(A(r, c));
  out << "\nZ = " << format_double(Z[0]) << " " << format_double(Z[1]) << " "
      << format_double(Z[2]) << "\n";
  out << "r_squared = " << format_double(r_squared[0]) << " " << format_double(r_squared[1])
      << " " << format_double(r_squared[2]) << "\n";
  out << "residual_rms = " << format_double(residual_rms[0]) << " "
      << format_double(residual_rms[1]) << " " << format_double(residual_rms[2]) << "\n";
  return out.str();
}

CalibrationModel CalibrationModel::parse(const std::string& text) {
  ConfigFile cfg = ConfigFile::parse_text("[m]\n" + text, "<calibration>");
  CalibrationModel model;
  const auto a = cfg.get_vector("m", "A", 12);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) model.A(r, c) = a[r * 4 + c];
  const auto z = cfg.get_vector("m", "Z", 3);
  model.Z = Vec3(z[0], z[1], z[2]);
  const auto r2 = cfg.get_vector("m", "r_squared", 3);
  model.r_squared = Vec3(r2[0], r2[1], r2[2]);
  const auto rr = cfg.get_vector("m", "residual_rms", 3);
  model.residual_rms = Vec3(rr[0], rr[1], rr[2]);
  model.fitted = true;
  return model;
}

std::string calibration_samples_csv(const std::vector<CalibrationSample>& samples) {
  std::ostringstream out;
  out << "o_x,o_y,o_z,f_net_x,f_net_y,f_net_z,sample_count\n";
  for (const auto& s : samples) {
    out << format_double(s.orientation.o.x()) << "," << format_double(s.orientation.o.y()) << ","
        << format_double(s.orientation.o.z()) << "," << format_double(s.mean_f_net.x()) << ","
        << format_double(s.mean_f_net.y()) << "," << format_double(s.mean_f_net.z()) << ","
        << s.sample_count << "\n";
  }
  return out.str();
}

}  // namespace swabsim

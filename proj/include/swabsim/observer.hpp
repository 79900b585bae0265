#pragma once

#include <stdexcept>

#include "swabsim/types.hpp"

namespace swabsim {

/// Fuzzy termination observer: the insertion halts when the product of a
/// force membership and a displacement membership crosses a threshold,
///   p_f    = sigmoid(nu_f (f_z - fbar_z))
///   p_eps  = sigmoid(nu_eps (eps - epsbar))
///   p_term = p_f * p_eps
/// with eps the straight-line displacement of the end-effector from its
/// start position.
struct ObserverParams {
  double fbar_z = 0.167;   // N
  double nu_f = 30.0;
  double epsbar = 0.085;   // m
  double nu_eps = 40.0;
  double threshold = 0.5;

  void validate() const {
    if (!(fbar_z > 0 && nu_f > 0 && epsbar > 0 && nu_eps > 0 && threshold > 0))
      throw std::invalid_argument("observer: all parameters must be positive");
  }
};

struct ObserverDecision {
  double p_f = 0.0;
  double p_eps = 0.0;
  double p_term = 0.0;
  double eps = 0.0;  // m
  bool terminate = false;
};

class TerminationObserver {
 public:
  TerminationObserver(const ObserverParams& params, const Vec3& start_position)
      : params_(params), start_(start_position) {
    params_.validate();
  }

  /// Latched: once the threshold is crossed the decision stays true.
  ObserverDecision observe(double f_z, const Vec3& current_position) {
    ObserverDecision d;
    d.eps = (current_position - start_).norm();
    d.p_f = sigmoid(params_.nu_f * (f_z - params_.fbar_z));
    d.p_eps = sigmoid(params_.nu_eps * (d.eps - params_.epsbar));
    d.p_term = d.p_f * d.p_eps;
    latched_ = latched_ || d.p_term > params_.threshold;
    d.terminate = latched_;
    last_ = d;
    return d;
  }

  const ObserverDecision& last() const { return last_; }
  const Vec3& start_position() const { return start_; }

 private:
  ObserverParams params_;
  Vec3 start_;
  bool latched_ = false;
  ObserverDecision last_;
};

}  // namespace swabsim

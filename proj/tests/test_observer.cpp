#include <doctest.h>

#include "swabsim/observer.hpp"
#include "swabsim/rng.hpp"

using namespace swabsim;

namespace {
ObserverParams defaults() { return ObserverParams{}; }
}  // namespace

TEST_CASE("both memberships at their midpoints give p_term = 0.25, no stop") {
  TerminationObserver obs(defaults(), Vec3::Zero());
  const auto d = obs.observe(0.167, Vec3(0.085, 0, 0));
  CHECK(d.p_f == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.p_eps == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.p_term == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_FALSE(d.terminate);
}

TEST_CASE("saturated force and displacement trigger termination") {
  TerminationObserver obs(defaults(), Vec3::Zero());
  const auto d = obs.observe(0.4, Vec3(0.12, 0, 0));
  CHECK(d.p_f == doctest::Approx(0.99908).epsilon(1e-4));
  CHECK(d.p_eps == doctest::Approx(0.80218).epsilon(1e-4));
  CHECK(d.p_term == doctest::Approx(0.8014).epsilon(2e-4));
  CHECK(d.terminate);
}

TEST_CASE("the force gate blocks termination on displacement alone") {
  TerminationObserver obs(defaults(), Vec3::Zero());
  const auto d = obs.observe(0.05, Vec3(0.20, 0, 0));
  CHECK(d.p_f == doctest::Approx(0.0290).epsilon(2e-3));
  CHECK(d.p_term < 0.03);
  CHECK_FALSE(d.terminate);
}

TEST_CASE("p_term above 0.5 implies both memberships above 0.5") {
  Rng rng(21);
  TerminationObserver obs(defaults(), Vec3::Zero());
  for (int i = 0; i < 2000; ++i) {
    TerminationObserver fresh(defaults(), Vec3::Zero());
    const double f = rng.uniform(0.0, 0.6);
    const Vec3 p(rng.uniform(0.0, 0.2), rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05));
    const auto d = fresh.observe(f, p);
    if (d.p_term > 0.5) {
      CHECK(d.p_f > 0.5);
      CHECK(d.p_eps > 0.5);
    }
    CHECK(d.p_term > 0.0);
    CHECK(d.p_term < 1.0);
  }
}

TEST_CASE("p_term is monotone in force and displacement") {
  TerminationObserver obs(defaults(), Vec3::Zero());
  double prev = -1.0;
  for (int i = 0; i <= 50; ++i) {
    TerminationObserver fresh(defaults(), Vec3::Zero());
    const auto d = fresh.observe(0.01 * i, Vec3(0.1, 0, 0));
    CHECK(d.p_term >= prev);
    prev = d.p_term;
  }
  prev = -1.0;
  for (int i = 0; i <= 50; ++i) {
    TerminationObserver fresh(defaults(), Vec3::Zero());
    const auto d = fresh.observe(0.2, Vec3(0.004 * i, 0, 0));
    CHECK(d.p_term >= prev);
    prev = d.p_term;
  }
}

TEST_CASE("displacement ignores orientation and uses straight-line distance") {
  const Vec3 start(0.3, -0.1, 0.5);
  TerminationObserver obs(defaults(), start);
  const Vec3 pos = start + Vec3(0.03, 0.04, 0.0);
  CHECK(obs.observe(0.0, pos).eps == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("termination latches") {
  TerminationObserver obs(defaults(), Vec3::Zero());
  CHECK(obs.observe(0.5, Vec3(0.15, 0, 0)).terminate);
  // Force vanishes afterwards; the decision stays latched.
  CHECK(obs.observe(0.0, Vec3(0.15, 0, 0)).terminate);
}

TEST_CASE("parameters must be positive") {
  ObserverParams p;
  p.nu_f = 0.0;
  CHECK_THROWS_AS(TerminationObserver(p, Vec3::Zero()), std::invalid_argument);
}

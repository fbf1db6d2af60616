#include <cmath>
#include <numbers>

#include "doctest.h"
#include "solar/errors.hpp"
#include "solar/osw.hpp"

using namespace solar;

namespace {

constexpr double kPi = std::numbers::pi;

Field wave(PeriodicGrid g, double k, bool cosine, double amp = 1.0) {
  return Field::sample(g, [=](double t) {
    return amp * (cosine ? std::cos(2 * kPi * k * t) : std::sin(2 * kPi * k * t));
  });
}

}  // namespace

TEST_CASE("velocity from vorticity") {
  PeriodicGrid g(128);
  const auto v = osw_velocity(2 * kPi * wave(g, 1, false));
  CHECK((v.u_theta - 2 * kPi * wave(g, 1, true)).max_abs() <= 1e-12);
  CHECK((v.u - wave(g, 1, false)).max_abs() <= 1e-13);
  CHECK(osw_velocity(Field(g)).u.max_abs() == 0.0);

  const Field m = 4 * kPi * wave(g, 2, true);
  CHECK((hilbert(osw_velocity(m).u_theta) - m).max_abs() <= 1e-10);
  CHECK_THROWS_AS(osw_velocity(Field(g, 1.0)), std::invalid_argument);
}

TEST_CASE("force of a single mode is the constant 2 pi^2") {
  PeriodicGrid g(64);
  for (bool cosine : {false, true}) {
    const Field F = osw_force(wave(g, 1, cosine));
    CHECK(F.size() == 128);
    CHECK((F - 2 * kPi * kPi).max_abs() <= 1e-10);
    CHECK(F.min() > 0.0);
  }
  CHECK(osw_force(Field(g)).max_abs() == 0.0);
}

TEST_CASE("force is positive for random band-limited data") {
  PeriodicGrid g(64);
  for (int seed = 1; seed <= 10; ++seed) {
    const Field u = Field::sample(g, [=](double t) {
      double s = 0.0;
      for (int k = 1; k <= 5; ++k) {
        s += std::sin(seed * 1.3 + k * 0.7) / k * std::sin(2 * kPi * k * t + seed * k);
      }
      return s;
    });
    CAPTURE(seed);
    CHECK(osw_force(u - mean(u)).min() > 0.0);
  }
}

TEST_CASE("zero data stays frozen") {
  PeriodicGrid g(32);
  OswState s = osw_initial_state(Field(g), 1.0);
  for (int i = 0; i < 10; ++i) s = osw_step(s, 0.01);
  CHECK(s.m.max_abs() == 0.0);
  CHECK((s.eta_theta - 1.0).max_abs() == 0.0);
  CHECK((s.eta - Field::sample(g, [](double t) { return t; })).max_abs() == 0.0);
  CHECK_THROWS_AS(osw_initial_state(Field(g, 0.5), 1.0), std::invalid_argument);
}

TEST_CASE("attracting case breaks down") {
  PeriodicGrid g(256);
  OswConfig c;
  c.n = 256;
  c.dt = 1e-3;
  c.t_end = 2.0;
  const auto out = integrate_osw(wave(g, 1, false), 1.0, c);
  CHECK(out.reached_stop);
  CHECK(out.stop_time < 0.5);
  CHECK(out.min_eta_theta_monotone);
  CHECK(out.force_positive);
  CHECK(out.mean_m_drift <= 1e-10);
}

TEST_CASE("De Gregorio keeps the transport identity and the eta_theta bound") {
  PeriodicGrid g(256);
  OswConfig c;
  c.n = 256;
  c.dt = 1e-3;
  c.t_end = 1.0;
  c.keep_states = true;
  c.sample_every = 50;
  const Field u0 = wave(g, 1, false);
  const auto out = integrate_osw(u0, -1.0, c);
  CHECK_FALSE(out.reached_stop);
  CHECK(out.force_positive);
  CHECK(out.max_vorticity_err <= 1e-8);
  CHECK(out.ermakov.rho_relative <= 1e-5);
  CHECK(out.ermakov.linear_relative <= 1e-5);
  CHECK(out.ermakov.angular_momentum_error <= 1e-10);
  CHECK(out.degregorio_margin <= 1e-6);
  CHECK(degregorio_bound_check(out.samples, u0, 0.1 * out.m0.max_abs()) <= 1e-6);
  // the steady mode: sin is a stationary solution for lambda = -1
  CHECK((out.final_state.m - out.m0).max_abs() <= 1e-9);
  // theta = 0 is an unstable stagnation point: eta_theta = exp(2 pi t)
  CHECK(out.final_state.eta_theta[0] == doctest::Approx(std::exp(2 * kPi)).epsilon(1e-8));
}

TEST_CASE("ermakov check on a quiet state") {
  PeriodicGrid g(32);
  OswState a = osw_initial_state(Field(g), -1.0);
  OswState b = a;
  OswState c = a;
  b.t = 0.1;
  c.t = 0.2;
  const auto r = ermakov_check(a, b, c);
  CHECK(r.rho_residual == 0.0);
  CHECK(r.linear_residual == 0.0);
  c.t = 0.3;
  CHECK_THROWS_AS(ermakov_check(a, b, c), std::invalid_argument);
}

TEST_CASE("eta_theta bound at points where u0' vanishes") {
  PeriodicGrid g(64);
  OswState s = osw_initial_state(wave(g, 1, false), -1.0);
  s.eta_theta[16] = 1.5;  // theta = 1/4: u0' = 0, m0 != 0, so the bound is 1
  const double margin = degregorio_bound_check({s}, wave(g, 1, false), 0.1 * s.m0.max_abs());
  CHECK(margin == doctest::Approx(0.5));
  CHECK(degregorio_bound_check({osw_initial_state(Field(g), -1.0)}, Field(g), 0.0) ==
        -std::numeric_limits<double>::infinity());
}

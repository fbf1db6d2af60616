#include <cmath>
#include <numbers>

#include "doctest.h"
#include "solar/errors.hpp"
#include "solar/solar_model.hpp"

using namespace solar;

namespace {

constexpr double kPi = std::numbers::pi;

Field wave(PeriodicGrid g, double c, double a) {
  return Field::sample(g, [=](double t) {
    return c + a * std::sin(2 * kPi * t) + 0.3 * a * std::cos(4 * kPi * t);
  });
}

}  // namespace

TEST_CASE("model parameters") {
  CHECK_THROWS_WITH_AS(ModelParams(1.0, 0.0), doctest::Contains("gamma"), std::invalid_argument);
  CHECK(ModelParams(2.0, 0.0).gamma() == 2.0);
  CHECK(ModelParams(3.0, 0.0).gamma() == 1.0);
  CHECK(ModelParams(5.0, 0.0).gamma() == 0.5);
  CHECK(ModelParams(2.0, 0.0).allows_sign_change());
  CHECK(ModelParams(3.0, 0.0).allows_sign_change());
  CHECK_FALSE(ModelParams(5.0, 0.0).allows_sign_change());
  CHECK_FALSE(ModelParams(-1.0, 0.0).allows_sign_change());
  CHECK(ModelParams(2.0, 1.5).g_coefficient() == 1.5);
  CHECK(ModelParams(3.0, 0.0).e_coefficient() == 0.0);
  CHECK(ModelParams(2.0, 0.0).e_coefficient() == -0.25);
}

TEST_CASE("initial state") {
  PeriodicGrid g(64);
  const Field u0 = wave(g, 0.7, 0.2);
  const ModelParams p(2.0, 0.7);
  const SolarState s = initial_state(u0, p);
  CHECK((s.x - 1.0).max_abs() == 0.0);
  CHECK((s.v - 0.5 * derivative(u0)).max_abs() <= 1e-15);
  CHECK(s.y.max_abs() == 0.0);
  CHECK((s.w - initial_momentum(u0)).max_abs() == 0.0);
  CHECK((angular_momentum(s) - initial_momentum(u0)).max_abs() <= 1e-15);
  const auto r = constraint_residuals(s, p);
  CHECK(r.c1 <= 1e-15);
  CHECK(r.c2 <= 1e-15);
  CHECK(r.c3 <= 1e-12);
  CHECK_THROWS_AS(initial_state(u0, ModelParams(2.0, 0.0)), std::invalid_argument);
}

TEST_CASE("initial momentum") {
  PeriodicGrid g(64);
  const Field u0 = Field::sample(g, [](double t) { return 1.0 + 0.1 * std::sin(2 * kPi * t); });
  const Field m0 = initial_momentum(u0);
  const double amp = 0.1 * 4 * kPi * kPi;
  for (std::size_t j = 0; j < g.size(); ++j) {
    CHECK(m0[j] == doctest::Approx(1.0 + amp * std::sin(2 * kPi * g.theta(j))).epsilon(1e-11));
  }
}

TEST_CASE("forcing at t = 0") {
  PeriodicGrid g(128);
  const Field u0 = Field::sample(g, [](double t) { return std::sin(2 * kPi * t); });

  SUBCASE("Hunter-Saxton force is -K^2 with K^2 = mean(u0'^2)/4") {
    const ModelParams p(2.0, 0.0);
    const auto d = forcing(initial_state(u0, p), p);
    CHECK(d.E == doctest::Approx(2 * kPi * kPi).epsilon(1e-12));
    CHECK((d.F + kPi * kPi / 2).max_abs() <= 1e-11);
  }
  SUBCASE("Burgers has no force") {
    const ModelParams p(3.0, 0.0);
    CHECK(forcing(initial_state(u0, p), p).F.max_abs() == 0.0);
  }
  SUBCASE("G is u - sigma in Lagrangian labels at t = 0") {
    const Field u1 = u0 + 0.4;
    for (double lambda : {2.0, 3.0, 5.0, -1.0}) {
      CAPTURE(lambda);
      const ModelParams p(lambda, 0.4);
      const auto d = forcing(initial_state(u1, p), p);
      CHECK((d.G - u0).max_abs() <= 1e-11);
    }
  }
}

TEST_CASE("G has the prescribed derivative and weighted mean") {
  PeriodicGrid g(128);
  const ModelParams p(5.0, 0.3);
  SolarState s(g);
  s.x = Field::sample(g, [](double t) { return 1.0 + 0.2 * std::cos(2 * kPi * t); });
  s.v = Field::sample(g, [](double t) { return 0.5 * std::sin(2 * kPi * t); });
  const auto d = forcing(s, p);
  const Field expect = p.gamma() * gamma_power(s.x, p, -1) * s.v;
  const Field xg = gamma_power(s.x, p);
  CHECK(std::abs(mean(d.G * xg)) <= 1e-14);
  // G is non-periodic only through its mean slope, which vanishes here
  // because the integrand has zero mean.
  CHECK(std::abs(mean(expect)) <= 1e-12);
  CHECK((derivative(d.G) - expect).max_abs() <= 1e-9);
}

TEST_CASE("gamma_power") {
  PeriodicGrid g(8);
  Field x(g, -2.0);
  CHECK(gamma_power(x, ModelParams(2.0, 0.0))[0] == 4.0);
  CHECK(gamma_power(x, ModelParams(2.0, 0.0), -3)[0] == -0.5);
  CHECK(gamma_power(Field(g, 4.0), ModelParams(5.0, 0.0))[0] == doctest::Approx(2.0));
}

TEST_CASE("positivity floor for non-integer gamma") {
  PeriodicGrid g(16);
  SolarState s(g);
  s.x[5] = 1e-12;
  CHECK_THROWS_AS(forcing(s, ModelParams(5.0, 0.0)), ManifoldError);
  CHECK_NOTHROW(forcing(s, ModelParams(2.0, 0.0)));
  s.x[5] = -0.5;
  CHECK_NOTHROW(forcing(s, ModelParams(3.0, 0.0)));
}

TEST_CASE("reflection is an involution and flips sigma-free quantities") {
  PeriodicGrid g(32);
  const Field u0 = wave(g, 0.5, 0.3);
  const ModelParams p(3.0, 0.5);
  SolarState s = initial_state(u0, p);
  s.y = Field::sample(g, [](double t) { return std::cos(2 * kPi * t) + t; });
  s.b = 0.25;
  const SolarState rr = reflect(reflect(s));
  CHECK((rr.x - s.x).max_abs() == 0.0);
  CHECK((rr.y - s.y).max_abs() == 0.0);
  CHECK((rr.w - s.w).max_abs() == 0.0);
  CHECK(rr.b == s.b);

  // the reflected data -u0(1 - theta) starts at the reflected state
  const Field v0 = -reflect(u0);
  const SolarState sv = initial_state(v0, ModelParams(3.0, -0.5));
  const SolarState s0 = reflect(initial_state(u0, p));
  CHECK((sv.v - s0.v).max_abs() <= 1e-12);
  CHECK((sv.w - s0.w).max_abs() <= 1e-9);
}

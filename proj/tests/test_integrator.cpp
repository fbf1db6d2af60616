#include <cmath>
#include <cstring>
#include <numbers>

#include "doctest.h"
#include "solar/closed_form.hpp"
#include "solar/errors.hpp"
#include "solar/integrator.hpp"

using namespace solar;

namespace {

constexpr double kPi = std::numbers::pi;

Field mode(PeriodicGrid g, double c, double a) {
  return Field::sample(g, [=](double t) { return c + a * std::sin(2 * kPi * t); });
}

RunConfig config(std::size_t n, double dt, double t_end) {
  RunConfig c;
  c.n = n;
  c.dt = dt;
  c.t_end = t_end;
  return c;
}

}  // namespace

TEST_CASE("run configuration validation") {
  RunConfig c;
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.sample_every = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.event_refine_tol = 1e-20;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_NOTHROW(RunConfig{}.validate());
  PeriodicGrid g(64);
  CHECK_THROWS_AS(integrate(mode(g, 0, 0.1), ModelParams(2, 0), config(128, 1e-2, 0.1)),
                  std::invalid_argument);
}

TEST_CASE("sign transition classification") {
  PeriodicGrid g(64);
  const Field m0 = Field::sample(g, [](double t) { return std::sin(2 * kPi * t); });
  CHECK(classify_transition(m0, 32, 1e-9) == SignTransition::PlusToMinus);
  CHECK(classify_transition(m0, 0, 1e-9) == SignTransition::MinusToPlus);
  CHECK(classify_transition(m0, 48, 1e-9) == SignTransition::InteriorNegative);
  CHECK(classify_transition(m0, 16, 1e-9) == SignTransition::InteriorPositive);
  CHECK(classify_transition(Field(g, 0.0), 5, 1e-9) == SignTransition::Zero);
  CHECK(to_string(SignTransition::PlusToMinus) == "plus_to_minus");
}

TEST_CASE("Burgers run matches the closed form") {
  PeriodicGrid g(64);
  const Field u0 = mode(g, 0.0, 0.1);
  const auto out = integrate(u0, ModelParams(3, 0), config(64, 1e-2, 1.0));
  CHECK(out.status == RunStatus::Completed);
  const auto exact = burgers_solution(u0, 1.0);
  CHECK((out.final_state.x - exact.x).max_abs() <= 1e-12);
  CHECK((out.final_state.y - exact.y).max_abs() <= 1e-12);
  CHECK(out.final_state.t == 1.0);
}

TEST_CASE("Hunter-Saxton run matches the closed form and finds breakdown") {
  PeriodicGrid g(128);
  const Field u0 = mode(g, 0.0, 1.0 / kPi);
  const ModelParams p(2, 0);
  const double T = *hs_breakdown_time(u0);

  const auto early = integrate(u0, p, config(128, 1e-3, 0.5));
  const auto exact = hs_solution(u0, 0.5);
  CHECK((early.final_state.x - exact.x).max_abs() <= 1e-10);
  CHECK((early.final_state.w - exact.w).max_abs() <= 1e-8);

  const auto out = integrate(u0, p, config(128, 1e-3, 2.0));
  CHECK(out.status == RunStatus::StoppedAtBreakdown);
  REQUIRE(out.breakdown.occurred);
  CHECK(std::abs(out.breakdown.T - T) <= 1e-8);
  CHECK(out.breakdown.theta_star == 0.5);
  CHECK(out.breakdown.sign_transition == SignTransition::PlusToMinus);
  CHECK(out.breakdown.bracket_width <= 1e-10);
  CHECK(out.final_state.t == out.breakdown.T);
  CHECK(std::abs(out.final_state.x.min()) <= 1e-8);
}

TEST_CASE("continuation past breakdown for integer gamma") {
  PeriodicGrid g(64);
  const Field u0 = mode(g, 0.0, 1.0 / kPi);
  RunConfig c = config(64, 1e-3, 1.5);
  c.continuation = true;
  const auto out = integrate(u0, ModelParams(2, 0), c);
  CHECK(out.status == RunStatus::Completed);
  CHECK(out.breakdown.occurred);
  CHECK(out.final_state.t == 1.5);
  CHECK(out.final_state.x.min() < 0.0);
  CHECK((out.final_state.x - hs_solution(u0, 1.5).x).max_abs() <= 1e-9);
}

TEST_CASE("constant data rotates rigidly") {
  PeriodicGrid g(32);
  const auto out = integrate(Field(g, 1.0), ModelParams(2, 1), config(32, 1e-2, 1.0));
  const auto exact = constant_solution(g, 1.0, 1.0);
  CHECK((out.final_state.x - exact.x).max_abs() <= 1e-14);
  CHECK((out.final_state.y - exact.y).max_abs() <= 1e-13);
  CHECK(out.final_state.b == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("invariants along a sigma != 0 run") {
  PeriodicGrid g(128);
  const Field u0 = mode(g, 1.0, 0.05);
  const auto out = integrate(u0, ModelParams(2, 1), config(128, 1e-3, 0.3));
  REQUIRE(out.series.size() >= 3);
  for (const auto& row : out.series) {
    CAPTURE(row.t);
    CHECK(row.c1 <= 1e-10);
    CHECK(row.c2 <= 1e-10);
    CHECK(row.c3 <= 1e-8);
    CHECK(row.angmom_err_max <= 1e-10);
    CHECK(std::abs(row.sigma - 1.0) <= 1e-9);
  }
}

TEST_CASE("angular momentum error shrinks at fourth order") {
  PeriodicGrid g(64);
  const Field u0 = mode(g, 1.0, 0.1);
  const ModelParams p(2, 1);
  auto err = [&](double dt) {
    return (angular_momentum(integrate(u0, p, config(64, dt, 0.4)).final_state) -
            initial_momentum(u0))
        .max_abs();
  };
  const double ratio = err(0.04) / err(0.02);
  CAPTURE(ratio);
  CHECK(ratio >= 8.0);
  CHECK(ratio <= 40.0);
}

TEST_CASE("non-integer gamma stops at the positivity floor") {
  PeriodicGrid g(64);
  const Field u0 = mode(g, 0.0, 0.3);
  const auto out = integrate(u0, ModelParams(4, 0), config(64, 1e-3, 5.0));
  CHECK(out.status == RunStatus::ManifoldExit);
  CHECK(out.breakdown.manifold_exit);
  CHECK(out.final_state.x.min() > 0.0);
  CHECK(out.final_state.x.min() < 1e-2);
}

TEST_CASE("runs are bitwise reproducible") {
  PeriodicGrid g(64);
  const Field u0 = mode(g, 0.5, 0.2);
  const auto a = integrate(u0, ModelParams(3, 0.5), config(64, 1e-2, 0.5));
  const auto b = integrate(u0, ModelParams(3, 0.5), config(64, 1e-2, 0.5));
  REQUIRE(a.series.size() == b.series.size());
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    CHECK(std::memcmp(&a.series[i], &b.series[i], sizeof(SeriesRow)) == 0);
  }
}

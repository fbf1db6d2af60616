#include <cmath>
#include <numbers>

#include "doctest.h"
#include "solar/closed_form.hpp"
#include "solar/diagnostics.hpp"
#include "solar/quadrature.hpp"

using namespace solar;

namespace {

constexpr double kPi = std::numbers::pi;

Field mode(PeriodicGrid g, double c, double a) {
  return Field::sample(g, [=](double t) { return c + a * std::sin(2 * kPi * t); });
}

RunConfig config(std::size_t n, double dt, double t_end, std::size_t every = 10) {
  RunConfig c;
  c.n = n;
  c.dt = dt;
  c.t_end = t_end;
  c.sample_every = every;
  return c;
}

// Crossing of 1 + 4 pi^2 a sin(2 pi theta) = 0 with sin decreasing.
double falling_root(double a) {
  return 0.5 + std::asin(1.0 / (4 * kPi * kPi * a)) / (2 * kPi);
}

}  // namespace

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  CHECK(integrate_gauss([](double x) { return x * x; }, 0.0, 3.0, 4) ==
        doctest::Approx(9.0).epsilon(1e-14));
  CHECK(integrate_gauss([](double x) { return std::pow(x, 9); }, -1.0, 2.0, 5) ==
        doctest::Approx((1024.0 - 1.0) / 10.0).epsilon(1e-13));
  const auto r = gauss_legendre(3);
  CHECK(r.nodes[1] == doctest::Approx(0.0));
  CHECK(r.weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("reconstruction at t = 0 is the identity") {
  PeriodicGrid g(256);
  const Field u0 = Field::sample(
      g, [](double t) { return 0.3 + 0.2 * std::sin(2 * kPi * t) + 0.05 * std::cos(6 * kPi * t); });
  const ModelParams p(2, mean(u0));
  const auto snap = reconstruct(initial_state(u0, p), p);
  CHECK((snap.u - u0).max_abs() <= 1e-8);
  CHECK((snap.u_theta - derivative(u0)).max_abs() <= 1e-8);
  CHECK((snap.m - initial_momentum(u0)).max_abs() <= 1e-6);
  CHECK(vorticity_transport_check(initial_state(u0, p), snap, p, initial_momentum(u0)) <= 1e-6);
}

TEST_CASE("constant data reconstructs to a constant") {
  PeriodicGrid g(64);
  const ModelParams p(3, 0.7);
  const auto snap = reconstruct(constant_solution(g, 0.7, 1.0), p);
  CHECK((snap.u - 0.7).max_abs() <= 1e-13);
  CHECK((snap.m - 0.7).max_abs() <= 1e-12);
  CHECK((snap.eta - Field::sample(g, [](double t) { return t + 0.7; })).max_abs() <= 1e-13);
  const auto q = conserved_quantities(snap);
  CHECK(q.sigma == doctest::Approx(0.7));
  CHECK(q.E <= 1e-24);
  CHECK(pde_residual(snap, reconstruct(constant_solution(g, 0.7, 1.1), p),
                     reconstruct(constant_solution(g, 0.7, 1.2), p), p) <= 1e-12);
}

TEST_CASE("Burgers velocity is transported along characteristics") {
  PeriodicGrid g(256);
  const Field u0 = mode(g, 0.0, 1.0 / (2 * kPi));
  const ModelParams p(3, 0);
  const auto out = integrate(u0, p, config(256, 1e-3, 0.5));
  const auto snap = reconstruct(out.final_state, p);
  const PeriodicInterpolant u(snap.u);
  double err = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) err = std::max(err, std::abs(u(snap.eta[j]) - u0[j]));
  CHECK(err <= 1e-6);
}

TEST_CASE("PDE residual on closed-form runs") {
  PeriodicGrid g(256);
  SUBCASE("Burgers") {
    const Field u0 = mode(g, 0.0, 1.0 / (2 * kPi));
    const ModelParams p(3, 0);
    const auto out = integrate(u0, p, config(256, 1e-3, 0.501, 1));
    const auto& s = out.samples;
    REQUIRE(s.size() == 502);
    const double r = pde_residual(reconstruct(s[499], p), reconstruct(s[500], p),
                                  reconstruct(s[501], p), p);
    CHECK(r <= 1e-3);
  }
  SUBCASE("Hunter-Saxton") {
    const Field u0 = mode(g, 0.0, 2.0 / kPi * std::atan(1.0 / std::sqrt(2.0)));
    const ModelParams p(2, 0);
    const auto out = integrate(u0, p, config(256, 1e-3, 0.301, 1));
    const auto& s = out.samples;
    const double r = pde_residual(reconstruct(s[299], p), reconstruct(s[300], p),
                                  reconstruct(s[301], p), p);
    CHECK(r <= 1e-3);
  }
}

TEST_CASE("vorticity transport on Hunter-Saxton") {
  PeriodicGrid g(512);
  const Field u0 = mode(g, 0.0, 2.0 / kPi * std::atan(1.0 / std::sqrt(2.0)));
  const ModelParams p(2, 0);
  const auto out = integrate(u0, p, config(512, 1e-3, 0.3));
  const auto snap = reconstruct(out.final_state, p);
  CHECK(vorticity_transport_check(out.final_state, snap, p, out.m0) <= 1e-4);
}

TEST_CASE("reconstruction refuses after breakdown") {
  PeriodicGrid g(64);
  SolarState s(g);
  s.x[4] = -0.1;
  CHECK_THROWS_AS(reconstruct(s, ModelParams(2, 0)), ReconstructionError);
}

TEST_CASE("McKean classification") {
  PeriodicGrid g(256);
  SUBCASE("positive momentum is global") {
    const auto v = mckean_classify(mode(g, 1.0, 0.01), 2);
    CHECK(v.kind == McKeanKind::Global);
    CHECK_FALSE(v.advisory);
  }
  SUBCASE("sign change breaks down at the falling crossing") {
    const auto v = mckean_classify(mode(g, 1.0, 0.1), 2);
    CHECK(v.kind == McKeanKind::Breakdown);
    REQUIRE(v.theta_star_candidates.size() == 1);
    CHECK(v.theta_star_candidates[0] == doctest::Approx(falling_root(0.1)).epsilon(1e-10));
    CHECK(falling_root(0.1) == doctest::Approx(0.5408).epsilon(1e-4));
  }
  SUBCASE("reflection invariance") {
    for (double a : {0.01, 0.1}) {
      const Field u0 = mode(g, 1.0, a);
      const auto v = mckean_classify(u0, 3);
      const auto r = mckean_classify(-reflect(u0), 3);
      CHECK(r.reflected);
      CHECK(r.kind == v.kind);
      REQUIRE(r.theta_star_candidates.size() == v.theta_star_candidates.size());
      for (std::size_t i = 0; i < v.theta_star_candidates.size(); ++i) {
        CHECK(r.theta_star_candidates[i] ==
              doctest::Approx(1.0 - v.theta_star_candidates[i]).epsilon(1e-10));
      }
    }
  }
  SUBCASE("constants, sigma zero and advisory lambdas") {
    CHECK(mckean_classify(Field(g, 2.0), 5).kind == McKeanKind::Global);
    CHECK(mckean_classify(Field(g, 0.0), 2).kind == McKeanKind::Global);
    CHECK(mckean_classify(mode(g, 0.0, 0.1), 2).kind == McKeanKind::SigmaZeroSpecial);
    CHECK(mckean_classify(mode(g, 1.0, 0.1), 4).advisory);
    CHECK_THROWS_AS(mckean_classify(mode(g, 1.0, 0.1), 1), std::invalid_argument);
  }
}

TEST_CASE("sign crossings of a shifted sine") {
  PeriodicGrid g(64);
  const Field f = Field::sample(g, [](double t) { return std::sin(2 * kPi * (t - 0.1)); });
  const auto falls = sign_crossings(f, true);
  const auto rises = sign_crossings(f, false);
  REQUIRE(falls.size() == 1);
  REQUIRE(rises.size() == 1);
  CHECK(falls[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(rises[0] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("lemma monitors on a sign-changing run") {
  PeriodicGrid g(256);
  const Field u0 = mode(g, 1.0, 0.1);
  for (double lambda : {2.0, 3.0}) {
    CAPTURE(lambda);
    const ModelParams p(lambda, 1.0);
    const auto out = integrate(u0, p, config(256, 1e-3, 5.0));
    REQUIRE(out.breakdown.occurred);
    const auto rep = lemma_monitors(out);
    REQUIRE(rep.applicable);
    CHECK(rep.a == doctest::Approx(falling_root(0.1)).epsilon(1e-9));
    CHECK(rep.d == doctest::Approx(1.5 - falling_root(0.1)).epsilon(1e-9));
    CHECK(rep.M > 0.0);
    CHECK(rep.N > 0.0);
    CHECK(rep.samples_checked > 2);
    CHECK(rep.integral_samples_checked > 1);
    CHECK(rep.monotone_ok);
    CHECK(rep.upper_bound_ok);
    CHECK(rep.decay_ok);
    CHECK(rep.integral_ok);
    CHECK(std::abs(out.breakdown.theta_star - falling_root(0.1)) <= 2.0 / 256);
  }
}

TEST_CASE("lemma monitors are not applicable for positive momentum") {
  PeriodicGrid g(64);
  const auto out = integrate(mode(g, 1.0, 0.01), ModelParams(2, 1), config(64, 1e-2, 0.1));
  const auto rep = lemma_monitors(out);
  CHECK_FALSE(rep.applicable);
  CHECK(rep.all_ok());
}

TEST_CASE("chain-rule u_theta_theta agrees with the Eulerian derivative on smooth flows") {
  PeriodicGrid g(128);
  const Field u0 = mode(g, 1.0, 0.05);
  const ModelParams p(2, 1);
  RunConfig c;
  c.n = 128;
  c.t_end = 0.5;
  const auto out = integrate(u0, p, c);
  const auto snap = reconstruct(out.final_state, p);
  CHECK((snap.u_theta_theta - derivative(snap.u_theta)).max_abs() <= 1e-8);
  CHECK((snap.m - (p.sigma() - snap.u_theta_theta)).max_abs() == 0.0);
}

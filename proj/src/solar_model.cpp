#include "solar/solar_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "solar/errors.hpp"

namespace solar {

namespace {

double ipow(double x, int k) {
  if (k < 0) return 1.0 / ipow(x, -k);
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

bool is_integer(double g) { return std::isfinite(g) && g == std::round(g); }

void require_on_manifold(const Field& x, const ModelParams& params) {
  if (params.allows_sign_change()) return;
  const double lo = x.min();
  if (!(lo > params.positivity_floor())) {
    std::ostringstream msg;
    msg << "state left the manifold: min x = " << lo << " with gamma = " << params.gamma();
    throw ManifoldError(msg.str());
  }
}

}  // namespace

ModelParams::ModelParams(double lambda, double sigma, double positivity_floor)
    : lambda_(lambda), sigma_(sigma), gamma_(0.0), positivity_floor_(positivity_floor) {
  if (!std::isfinite(lambda) || !std::isfinite(sigma)) {
    throw std::invalid_argument("ModelParams: lambda and sigma must be finite");
  }
  if (lambda == 1.0) {
    throw std::invalid_argument("ModelParams: lambda = 1 makes gamma = 2/(lambda - 1) singular");
  }
  gamma_ = 2.0 / (lambda - 1.0);
}

bool ModelParams::allows_sign_change() const noexcept { return is_integer(gamma_) && gamma_ > 0; }

double ModelParams::g_coefficient() const noexcept {
  return lambda_ * (lambda_ - 1.0) * sigma_ / 2.0;
}

double ModelParams::e_coefficient() const noexcept {
  return (lambda_ - 1.0) * (lambda_ - 3.0) / 4.0;
}

SolarState::SolarState(PeriodicGrid grid)
    : x(grid, 1.0), v(grid), y(grid), w(grid), A(grid) {}

Field gamma_power(const Field& x, const ModelParams& params, int shift) {
  const double g = params.gamma();
  if (is_integer(g)) {
    const int k = static_cast<int>(g) + shift;
    return x.map([k](double xv) { return ipow(xv, k); });
  }
  const double p = g + shift;
  return x.map([p](double xv) { return std::exp(p * std::log(xv)); });
}

Field initial_momentum(const Field& u0) {
  const double sigma = mean(u0);
  Field m0 = -derivative(derivative(u0));
  m0 += sigma;
  return m0;
}

SolarState initial_state(const Field& u0, const ModelParams& params) {
  const double sigma = mean(u0);
  if (std::abs(sigma - params.sigma()) > 1e-12) {
    std::ostringstream msg;
    msg << "initial_state: mean(u0) = " << sigma << " differs from sigma = " << params.sigma();
    throw std::invalid_argument(msg.str());
  }
  SolarState s(u0.grid());
  s.v = derivative(u0) * (1.0 / params.gamma());
  s.w = initial_momentum(u0);
  return s;
}

ForcingDiagnostics forcing(const SolarState& state, const ModelParams& params) {
  require_on_manifold(state.x, params);
  const double g = params.gamma();
  const Field xg = gamma_power(state.x, params);
  const Field xg1 = gamma_power(state.x, params, -1);

  // Q_theta = gamma x^(gamma-1) x_t; subtracting the x^gamma-weighted mean
  // gives G with mean(G x^gamma) = 0.
  const Field q = g * (xg1 * state.v);
  const Field Q = cumulative_integral(q);
  const double weighted = mean(xg * Q) / mean(xg);

  ForcingDiagnostics d{0.0, Q - weighted, Field(state.x.grid())};

  const double ce = params.e_coefficient();
  const Field xg2 = gamma_power(state.x, params, -2);
  // For gamma = 1 this integrand is singular where x crosses zero; E then
  // only serves as a diagnostic because its coefficient in F vanishes.
  const Field e_density = xg2 * state.v * state.v;
  d.E = g * g * pairwise_sum(e_density.values()) / static_cast<double>(e_density.size());

  d.F = params.g_coefficient() * d.G;
  if (ce != 0.0) {
    if (!std::isfinite(d.E)) throw NumericalError("forcing: non-finite energy E");
    d.F += ce * d.E;
  }
  return d;
}

SolarTangent rhs(const SolarState& state, const ModelParams& params) {
  const ForcingDiagnostics d = forcing(state, params);
  SolarTangent k{state.v, d.F * state.x, state.w, d.F * state.y, gamma_power(state.x, params),
                 d.G[0] + params.sigma()};
  return k;
}

Field angular_momentum(const SolarState& state) {
  return state.x * state.w - state.y * state.v;
}

ConstraintResiduals constraint_residuals(const SolarState& state, const ModelParams& params) {
  ConstraintResiduals r;
  const Field xg = gamma_power(state.x, params);
  r.c1 = std::abs(mean(xg) - 1.0);
  const ForcingDiagnostics d = forcing(state, params);
  r.c2 = std::abs(mean(d.G * xg));
  const Field ydef =
      -params.gamma() * derivative(state.x) + params.sigma() * (state.x * state.A);
  r.c3 = (state.y - ydef).max_abs();
  return r;
}

SolarState reflect(const SolarState& state) {
  SolarState r(state.x.grid());
  r.t = state.t;
  r.x = reflect(state.x);
  r.v = reflect(state.v);
  r.y = -reflect(state.y);
  r.w = -reflect(state.w);
  r.A = reflect(state.A);
  r.b = -state.b;
  return r;
}

}  // namespace solar

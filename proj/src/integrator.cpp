#include "solar/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "solar/errors.hpp"

namespace solar {

namespace {

SolarState advanced(const SolarState& s, double h, const SolarTangent& k) {
  SolarState out(s.x.grid());
  out.t = s.t + h;
  out.x = axpy(s.x, h, k.dx);
  out.v = axpy(s.v, h, k.dv);
  out.y = axpy(s.y, h, k.dy);
  out.w = axpy(s.w, h, k.dw);
  out.A = axpy(s.A, h, k.dA);
  out.b = s.b + h * k.db;
  return out;
}

Field combine(const Field& base, double h, const Field& k1, const Field& k2, const Field& k3,
              const Field& k4) {
  Field out(base.grid());
  const double c = h / 6.0;
  for (std::size_t j = 0; j < base.size(); ++j) {
    out[j] = base[j] + c * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  return out;
}

bool acceptable(const SolarState& s, const ModelParams& params) {
  if (!s.x.all_finite() || !s.v.all_finite() || !s.y.all_finite() || !s.w.all_finite()) {
    throw NumericalError("integrate: non-finite state at t = " + std::to_string(s.t));
  }
  return params.allows_sign_change() || s.x.min() > params.positivity_floor();
}

// Largest step in [0, max_step] (to within tol) that keeps the state on the manifold.
BreakdownReport refine_manifold_exit(const SolarState& checkpoint, const ModelParams& params,
                                     double max_step, double tol, const Field& m0,
                                     double sign_band) {
  auto ok = [&](double h) {
    try {
      return acceptable(step_rk4(checkpoint, params, h), params);
    } catch (const ManifoldError&) {
      return false;
    }
  };
  double lo = 0.0;
  double hi = max_step;
  BreakdownReport rep;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
    ++rep.bisection_steps;
  }
  const SolarState at = lo > 0.0 ? step_rk4(checkpoint, params, lo) : checkpoint;
  rep.occurred = true;
  rep.manifold_exit = true;
  rep.T = checkpoint.t + lo;
  rep.bracket_width = hi - lo;
  rep.index = at.x.argmin();
  rep.theta_star = at.x.grid().theta(rep.index);
  rep.sign_transition = classify_transition(m0, rep.index, sign_band);
  return rep;
}

}  // namespace

void RunConfig::validate() const {
  std::ostringstream msg;
  if (!(dt > 0.0)) msg << "dt must be positive; ";
  if (!(t_end > 0.0)) msg << "t_end must be positive; ";
  if (sample_every == 0) msg << "sample_every must be >= 1; ";
  if (!(event_refine_tol >= std::numeric_limits<double>::epsilon() * t_end)) {
    msg << "event_refine_tol below machine epsilon * t_end; ";
  }
  if (!msg.str().empty()) throw std::invalid_argument("RunConfig: " + msg.str());
}

std::string to_string(SignTransition s) {
  switch (s) {
    case SignTransition::PlusToMinus: return "plus_to_minus";
    case SignTransition::MinusToPlus: return "minus_to_plus";
    case SignTransition::InteriorNegative: return "interior_negative";
    case SignTransition::InteriorPositive: return "interior_positive";
    case SignTransition::Zero: return "zero";
  }
  return "zero";
}

SignTransition classify_transition(const Field& m0, std::size_t j, double sign_band) {
  const std::size_t n = m0.size();
  const double eps = sign_band * m0.max_abs();
  const std::size_t window = std::max<std::size_t>(4, n / 64);
  auto sign_at = [&](std::size_t idx) {
    const double v = m0[idx % n];
    return v > eps ? 1 : (v < -eps ? -1 : 0);
  };
  // Nearest non-zero sign on each side, searched outward up to the window.
  int left = 0;
  int right = 0;
  for (std::size_t k = window; k >= 1 && left == 0; --k) left = sign_at(j + n - k);
  for (std::size_t k = window; k >= 1 && right == 0; --k) right = sign_at(j + k);
  if (left > 0 && right < 0) return SignTransition::PlusToMinus;
  if (left < 0 && right > 0) return SignTransition::MinusToPlus;
  if (left < 0 && right < 0) return SignTransition::InteriorNegative;
  if (left > 0 && right > 0) return SignTransition::InteriorPositive;
  return SignTransition::Zero;
}

SolarState step_rk4(const SolarState& s, const ModelParams& params, double dt) {
  const SolarTangent k1 = rhs(s, params);
  const SolarTangent k2 = rhs(advanced(s, 0.5 * dt, k1), params);
  const SolarTangent k3 = rhs(advanced(s, 0.5 * dt, k2), params);
  const SolarTangent k4 = rhs(advanced(s, dt, k3), params);
  SolarState out(s.x.grid());
  out.t = s.t + dt;
  out.x = combine(s.x, dt, k1.dx, k2.dx, k3.dx, k4.dx);
  out.v = combine(s.v, dt, k1.dv, k2.dv, k3.dv, k4.dv);
  out.y = combine(s.y, dt, k1.dy, k2.dy, k3.dy, k4.dy);
  out.w = combine(s.w, dt, k1.dw, k2.dw, k3.dw, k4.dw);
  out.A = combine(s.A, dt, k1.dA, k2.dA, k3.dA, k4.dA);
  out.b = s.b + dt / 6.0 * (k1.db + 2.0 * k2.db + 2.0 * k3.db + k4.db);
  return out;
}

SeriesRow diagnose(const SolarState& state, const ModelParams& params, const Field& m0) {
  SeriesRow row;
  row.t = state.t;
  row.min_x = state.x.min();
  const ForcingDiagnostics d = forcing(state, params);
  row.E = d.E;
  const Field xg = gamma_power(state.x, params);
  const Field U = d.G + params.sigma();
  row.sigma = mean(U * xg);
  row.L2 = mean(U * U * xg);
  row.angmom_err_max = (angular_momentum(state) - m0).max_abs();
  row.c1 = std::abs(mean(xg) - 1.0);
  row.c2 = std::abs(mean(d.G * xg));
  const Field ydef =
      -params.gamma() * derivative(state.x) + params.sigma() * (state.x * state.A);
  row.c3 = (state.y - ydef).max_abs();
  return row;
}

BreakdownReport refine_breakdown(const SolarState& checkpoint, const ModelParams& params,
                                 double max_step, double tol, const Field& m0,
                                 double sign_band) {
  auto min_x_after = [&](double h) { return step_rk4(checkpoint, params, h).x.min(); };
  if (!(checkpoint.x.min() > 0.0) || !(max_step > 0.0) || !(min_x_after(max_step) <= 0.0)) {
    throw NumericalError("refine_breakdown: no sign change of min x in the bracket");
  }
  BreakdownReport rep;
  double lo = 0.0;
  double hi = max_step;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (min_x_after(mid) > 0.0 ? lo : hi) = mid;
    ++rep.bisection_steps;
  }
  const double h = 0.5 * (lo + hi);
  const SolarState at = step_rk4(checkpoint, params, h);
  rep.occurred = true;
  rep.T = checkpoint.t + h;
  rep.bracket_width = hi - lo;
  rep.index = at.x.argmin();
  rep.theta_star = at.x.grid().theta(rep.index);
  rep.sign_transition = classify_transition(m0, rep.index, sign_band);
  return rep;
}

RunOutput integrate(const Field& u0, const ModelParams& params, const RunConfig& config) {
  config.validate();
  if (u0.size() != config.n) {
    throw std::invalid_argument("integrate: u0 has " + std::to_string(u0.size()) +
                                " samples but config.n = " + std::to_string(config.n));
  }
  const Field m0 = initial_momentum(u0);
  SolarState state = initial_state(u0, params);
  RunOutput out{params, config, u0, m0, {}, {}, state, {}, RunStatus::Completed};

  auto record = [&](const SolarState& s) {
    out.series.push_back(diagnose(s, params, m0));
    out.breakdown.min_x_history.emplace_back(s.t, s.x.min());
    if (config.keep_states) out.samples.push_back(s);
  };
  record(state);

  const auto steps =
      static_cast<std::size_t>(std::ceil(config.t_end / config.dt - 1e-9));
  const bool may_continue = config.continuation && params.allows_sign_change();

  for (std::size_t i = 1; i <= steps; ++i) {
    const double t_next = std::min(config.t_end, static_cast<double>(i) * config.dt);
    const double h = t_next - state.t;

    bool on_manifold = true;
    SolarState next(state.x.grid());
    try {
      next = step_rk4(state, params, h);
      on_manifold = acceptable(next, params);
    } catch (const ManifoldError&) {
      on_manifold = false;
    }
    if (!on_manifold) {
      auto history = std::move(out.breakdown.min_x_history);
      out.breakdown = refine_manifold_exit(state, params, h, config.event_refine_tol, m0,
                                           config.sign_band);
      out.breakdown.min_x_history = std::move(history);
      const double lo = out.breakdown.T - state.t;
      state = lo > 0.0 ? step_rk4(state, params, lo) : state;
      record(state);
      out.status = RunStatus::ManifoldExit;
      break;
    }
    next.t = t_next;

    if (!out.breakdown.occurred && state.x.min() > 0.0 && next.x.min() <= 0.0) {
      auto history = std::move(out.breakdown.min_x_history);
      out.breakdown = refine_breakdown(state, params, h, config.event_refine_tol, m0,
                                       config.sign_band);
      out.breakdown.min_x_history = std::move(history);
      if (!may_continue) {
        state = step_rk4(state, params, out.breakdown.T - state.t);
        state.t = out.breakdown.T;
        record(state);
        out.status = RunStatus::StoppedAtBreakdown;
        break;
      }
    }

    state = std::move(next);
    if (i % config.sample_every == 0 || i == steps) record(state);
  }
  out.final_state = state;
  return out;
}

}  // namespace solar

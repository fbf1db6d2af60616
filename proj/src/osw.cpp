#include "solar/osw.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "solar/errors.hpp"

namespace solar {

namespace {

struct OswTangent {
  Field dm;
  Field deta;
  Field deta_theta;
  Field dpsi;
};

double mean_tolerance(const Field& m) { return 1e-8 * std::max(1.0, m.max_abs()); }

Field power(const Field& f, double p) {
  if (p == 1.0) return f;
  if (p == -1.0) return f.map([](double v) { return 1.0 / v; });
  return f.map([p](double v) { return std::pow(v, p); });
}

OswTangent osw_rhs(const OswState& s) {
  const PeriodicGrid grid = s.m.grid();
  const std::size_t n = grid.size();
  const double lambda = s.lambda_osw;
  const OswVelocity vel = osw_velocity(s.m);

  const Field nonlinear = vel.u * derivative(s.m) + lambda * (vel.u_theta * s.m);
  OswTangent k{-lowpass(nonlinear, osw_dealias_cutoff(n)), Field(grid), Field(grid), Field(grid)};

  const PeriodicInterpolant u(vel.u);
  const PeriodicInterpolant ux(vel.u_theta);
  const Field inv = power(s.eta_theta, -lambda);
  for (std::size_t j = 0; j < n; ++j) {
    const double e = s.eta[j];
    k.deta[j] = u(e);
    k.deta_theta[j] = ux(e) * s.eta_theta[j];
    k.dpsi[j] = 0.5 * lambda * s.m0[j] * inv[j];
  }
  return k;
}

OswState advanced(const OswState& s, double h, const OswTangent& k) {
  OswState out = s;
  out.t = s.t + h;
  out.m = axpy(s.m, h, k.dm);
  out.eta = axpy(s.eta, h, k.deta);
  out.eta_theta = axpy(s.eta_theta, h, k.deta_theta);
  out.psi = axpy(s.psi, h, k.dpsi);
  return out;
}

Field rk4_combine(const Field& base, double h, const Field& a, const Field& b, const Field& c,
                  const Field& d) {
  Field out(base.grid());
  for (std::size_t j = 0; j < base.size(); ++j) {
    out[j] = base[j] + h / 6.0 * (a[j] + 2.0 * b[j] + 2.0 * c[j] + d[j]);
  }
  return out;
}

double degregorio_margin(const OswState& s, const Field& u0p, const Field& m0, double delta) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m0.size(); ++j) {
    if (std::abs(m0[j]) <= delta) continue;
    const double bound = 1.0 + u0p[j] * u0p[j] / (m0[j] * m0[j]);
    worst = std::max(worst, s.eta_theta[j] - bound);
  }
  return worst;
}

}  // namespace

OswState::OswState(PeriodicGrid grid)
    : m(grid), eta(Field::sample(grid, [](double th) { return th; })), eta_theta(grid, 1.0),
      psi(grid), m0(grid) {}

std::size_t osw_dealias_cutoff(std::size_t n) { return n / 3; }

OswVelocity osw_velocity(const Field& m) {
  const double avg = mean(m);
  if (std::abs(avg) > mean_tolerance(m)) {
    std::ostringstream msg;
    msg << "osw_velocity: mean(m) = " << avg << " must vanish";
    throw std::invalid_argument(msg.str());
  }
  Field ux = -hilbert(m);
  Field u = cumulative_integral(ux);
  u += -mean(u);
  return {std::move(u), std::move(ux)};
}

OswState osw_initial_state(const Field& u0, double lambda_osw) {
  if (std::abs(mean(u0)) > 1e-12 * std::max(1.0, u0.max_abs())) {
    throw std::invalid_argument("osw_initial_state: u0 must have zero mean");
  }
  OswState s(u0.grid());
  s.lambda_osw = lambda_osw;
  s.m = lowpass(hilbert(derivative(u0)), osw_dealias_cutoff(u0.size()));
  s.m0 = s.m;
  return s;
}

OswState osw_step(const OswState& s, double dt) {
  const OswTangent k1 = osw_rhs(s);
  const OswTangent k2 = osw_rhs(advanced(s, 0.5 * dt, k1));
  const OswTangent k3 = osw_rhs(advanced(s, 0.5 * dt, k2));
  const OswTangent k4 = osw_rhs(advanced(s, dt, k3));
  OswState out = s;
  out.t = s.t + dt;
  out.m = rk4_combine(s.m, dt, k1.dm, k2.dm, k3.dm, k4.dm);
  out.eta = rk4_combine(s.eta, dt, k1.deta, k2.deta, k3.deta, k4.deta);
  out.eta_theta = rk4_combine(s.eta_theta, dt, k1.deta_theta, k2.deta_theta, k3.deta_theta,
                              k4.deta_theta);
  out.psi = rk4_combine(s.psi, dt, k1.dpsi, k2.dpsi, k3.dpsi, k4.dpsi);
  if (!out.m.all_finite() || !out.eta_theta.all_finite() || !out.psi.all_finite()) {
    throw NumericalError("osw_step: non-finite state at t = " + std::to_string(out.t));
  }
  if (s.lambda_osw > 0.0 && !(out.eta_theta.min() > 0.0)) {
    throw ManifoldError("osw_step: eta_theta reached zero (breakdown) at t = " +
                        std::to_string(out.t));
  }
  return out;
}

Field osw_force(const Field& u) {
  const PeriodicGrid fine(2 * u.size());
  const Field uf = resample(u, fine);
  const Field uxx = derivative(derivative(uf));
  return -(uf * uxx) - hilbert(uf * hilbert(uxx));
}

double osw_vorticity_transport_error(const OswState& s) {
  const PeriodicInterpolant m(s.m);
  const Field w = power(s.eta_theta, s.lambda_osw);
  double worst = 0.0;
  for (std::size_t j = 0; j < s.m.size(); ++j) {
    worst = std::max(worst, std::abs(w[j] * m(s.eta[j]) - s.m0[j]));
  }
  return worst;
}

ErmakovResiduals ermakov_check(const OswState& a, const OswState& b, const OswState& c) {
  const double h = c.t - b.t;
  if (!(h > 0.0) || std::abs((b.t - a.t) - h) > 1e-9 * std::max(1.0, b.t)) {
    throw std::invalid_argument("ermakov_check: states must be equally spaced in time");
  }
  for (const OswState* s : {&a, &b, &c}) {
    if (!(s->eta_theta.min() > 0.0)) {
      throw std::invalid_argument("ermakov_check: eta_theta must stay positive");
    }
  }
  const double lambda = b.lambda_osw;
  const double half = 0.5 * lambda;
  const OswVelocity vel = osw_velocity(b.m);
  const Field Ff = osw_force(vel.u);
  const PeriodicInterpolant F(Ff);
  const PeriodicInterpolant ux(vel.u_theta);

  ErmakovResiduals r;
  r.min_force = Ff.min();
  const Field ra = power(a.eta_theta, half);
  const Field rb = power(b.eta_theta, half);
  const Field rc = power(c.eta_theta, half);
  const double h2 = h * h;
  for (std::size_t j = 0; j < b.m.size(); ++j) {
    const double f = F(b.eta[j]);
    const double m0 = b.m0[j];
    const double rho = rb[j];

    const double d2rho = (ra[j] - 2.0 * rho + rc[j]) / h2;
    const double t1 = 0.25 * lambda * lambda * m0 * m0 / (rho * rho * rho);
    const double t2 = half * f * rho;
    const double res = d2rho - t1 + t2;
    r.rho_residual = std::max(r.rho_residual, std::abs(res));
    r.rho_relative =
        std::max(r.rho_relative, std::abs(res) / (std::abs(d2rho) + std::abs(t1) + std::abs(t2)));

    auto xy = [&](const Field& rr, const OswState& s, std::size_t i, bool cosine) {
      return rr[i] * (cosine ? std::cos(s.psi[i]) : std::sin(s.psi[i]));
    };
    for (bool cosine : {true, false}) {
      const double q = xy(rb, b, j, cosine);
      const double d2 = (xy(ra, a, j, cosine) - 2.0 * q + xy(rc, c, j, cosine)) / h2;
      const double lres = d2 + half * f * q;
      r.linear_residual = std::max(r.linear_residual, std::abs(lres));
      r.linear_relative = std::max(
          r.linear_relative, std::abs(lres) / (std::abs(d2) + std::abs(half * f) * rho));
    }

    // Angular momentum of (x, y) from the state derivatives at the middle time.
    const double et = ux(b.eta[j]) * b.eta_theta[j];
    const double rho_t = half * rho / b.eta_theta[j] * et;
    const double psi_t = half * m0 / std::pow(b.eta_theta[j], lambda);
    const double cs = std::cos(b.psi[j]);
    const double sn = std::sin(b.psi[j]);
    const double x = rho * cs;
    const double y = rho * sn;
    const double xt = rho_t * cs - rho * psi_t * sn;
    const double yt = rho_t * sn + rho * psi_t * cs;
    r.angular_momentum_error =
        std::max(r.angular_momentum_error, std::abs(x * yt - y * xt - half * m0));
  }
  return r;
}

double degregorio_bound_check(const std::vector<OswState>& samples, const Field& u0,
                              double delta) {
  const Field u0p = derivative(u0);
  double worst = -std::numeric_limits<double>::infinity();
  for (const OswState& s : samples) {
    if (s.lambda_osw != -1.0) {
      throw std::invalid_argument("degregorio_bound_check: requires lambda_osw = -1");
    }
    worst = std::max(worst, degregorio_margin(s, u0p, s.m0, delta));
  }
  return worst;
}

void OswConfig::validate() const {
  std::ostringstream msg;
  if (!(dt > 0.0)) msg << "dt must be positive; ";
  if (!(t_end > 0.0)) msg << "t_end must be positive; ";
  if (sample_every == 0) msg << "sample_every must be >= 1; ";
  if (ermakov_stride == 0) msg << "ermakov_stride must be >= 1; ";
  if (!msg.str().empty()) throw std::invalid_argument("OswConfig: " + msg.str());
}

OswRunOutput integrate_osw(const Field& u0, double lambda_osw, const OswConfig& config) {
  config.validate();
  if (u0.size() != config.n) {
    throw std::invalid_argument("integrate_osw: u0 does not have config.n samples");
  }
  OswState state = osw_initial_state(u0, lambda_osw);
  OswRunOutput out{lambda_osw, config, u0, state.m0, state, {}, {}, 0.0, true, false, 0.0, true, 0.0, 0.0, {}, 0, 0.0, false};
  const Field u0p = derivative(u0);
  const double delta = config.bound_delta_fraction * state.m0.max_abs();
  const bool bound = lambda_osw == -1.0;
  const double mean_m0 = mean(state.m0);
  out.degregorio_checked = bound;
  out.degregorio_margin = -std::numeric_limits<double>::infinity();
  out.min_force = std::numeric_limits<double>::infinity();

  auto observe = [&](const OswState& s, bool sample) {
    const OswVelocity vel = osw_velocity(s.m);
    const double fmin = osw_force(vel.u).min();
    const bool nonzero = vel.u.max_abs() > 0.0;
    out.min_force = std::min(out.min_force, fmin);
    if (nonzero && !(fmin > 0.0)) out.force_positive = false;
    const double verr = osw_vorticity_transport_error(s);
    out.max_vorticity_err = std::max(out.max_vorticity_err, verr);
    const double mm = mean(s.m);
    out.mean_m_drift = std::max(out.mean_m_drift, std::abs(mm - mean_m0));
    if (bound) out.degregorio_margin = std::max(out.degregorio_margin, degregorio_margin(s, u0p, s.m0, delta));
    if (sample) {
      out.series.push_back({s.t, s.eta_theta.min(), s.eta_theta.max(), mm, fmin, verr});
      if (config.keep_states) out.samples.push_back(s);
    }
  };
  observe(state, true);

  const std::size_t window = 2 * config.ermakov_stride + 1;
  std::deque<OswState> recent{state};
  const auto steps = static_cast<std::size_t>(std::ceil(config.t_end / config.dt - 1e-9));
  double prev_min = state.eta_theta.min();
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t_next = std::min(config.t_end, static_cast<double>(i) * config.dt);
    OswState next = osw_step(state, t_next - state.t);
    next.t = t_next;
    state = std::move(next);

    const double cur_min = state.eta_theta.min();
    if (cur_min > prev_min) out.min_eta_theta_monotone = false;
    prev_min = cur_min;
    const bool stop = lambda_osw > 0.0 && cur_min <= config.stop_eta_theta;
    observe(state, stop || i % config.sample_every == 0 || i == steps);

    recent.push_back(state);
    if (recent.size() > window) recent.pop_front();
    if (recent.size() == window) {
      const ErmakovResiduals r =
          ermakov_check(recent.front(), recent[config.ermakov_stride], recent.back());
      ErmakovResiduals& w = out.ermakov;
      w.rho_residual = std::max(w.rho_residual, r.rho_residual);
      w.rho_relative = std::max(w.rho_relative, r.rho_relative);
      w.linear_residual = std::max(w.linear_residual, r.linear_residual);
      w.linear_relative = std::max(w.linear_relative, r.linear_relative);
      w.angular_momentum_error = std::max(w.angular_momentum_error, r.angular_momentum_error);
      w.min_force = out.ermakov_windows == 0 ? r.min_force : std::min(w.min_force, r.min_force);
      ++out.ermakov_windows;
    }
    if (stop) {
      out.reached_stop = true;
      out.stop_time = state.t;
      break;
    }
  }
  out.final_state = state;
  return out;
}

}  // namespace solar

#include "solar/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "solar/quadrature.hpp"

namespace solar {

namespace {

// Root of a monotone increasing g on the real line near `guess`, Newton with
// a bisection safeguard.
template <class G, class DG>
double invert_monotone(const G& g, const DG& dg, double target, double lo, double hi) {
  double glo = g(lo) - target;
  double ghi = g(hi) - target;
  for (int k = 0; glo > 0.0 && k < 60; ++k) {
    lo -= (hi - lo);
    glo = g(lo) - target;
  }
  for (int k = 0; ghi < 0.0 && k < 60; ++k) {
    hi += (hi - lo);
    ghi = g(hi) - target;
  }
  if (glo > 0.0 || ghi < 0.0) throw ReconstructionError("reconstruct: cannot bracket eta^-1");
  double th = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double r = g(th) - target;
    if (r == 0.0) return th;
    (r < 0.0 ? lo : hi) = th;
    const double d = dg(th);
    double next = d > 0.0 ? th - r / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - th) <= 1e-16 * std::max(1.0, std::abs(th)) || hi - lo <= 1e-16) {
      return next;
    }
    th = next;
  }
  return th;
}

double wrap01(double th) {
  double w = th - std::floor(th);
  return w >= 1.0 ? 0.0 : w;
}

}  // namespace

EulerianSnapshot reconstruct(const SolarState& state, const ModelParams& params) {
  if (!(state.x.min() > 0.0)) {
    std::ostringstream msg;
    msg << "reconstruct: min x = " << state.x.min() << " <= 0 at t = " << state.t
        << "; the flow map is not a diffeomorphism";
    throw ReconstructionError(msg.str());
  }
  const PeriodicGrid grid = state.x.grid();
  const std::size_t n = grid.size();
  const Field xg = gamma_power(state.x, params);
  const Field cum = cumulative_integral(xg);
  const double mu = mean(xg);

  Field periodic(grid);
  for (std::size_t j = 0; j < n; ++j) periodic[j] = cum[j] - mu * grid.theta(j);
  const PeriodicInterpolant D(periodic);
  const PeriodicInterpolant eta_theta(xg);
  auto eta = [&](double th) { return state.b + mu * th + D(th); };

  const ForcingDiagnostics d = forcing(state, params);
  const PeriodicInterpolant U(d.G + params.sigma());
  const Field ux_lag = params.gamma() * state.v * state.x.map([](double v) { return 1.0 / v; });
  const PeriodicInterpolant Ux(ux_lag);
  const PeriodicInterpolant Uxx(derivative(ux_lag) * xg.map([](double v) { return 1.0 / v; }));

  EulerianSnapshot snap{state.t, cum + state.b, Field(grid), Field(grid), Field(grid), Field(grid)};
  const double dmin = periodic.min() - 2.0 * grid.spacing();
  const double dmax = periodic.max() + 2.0 * grid.spacing();
  for (std::size_t j = 0; j < n; ++j) {
    const double phi = grid.theta(j);
    const double lo = (phi - state.b - dmax) / mu;
    const double hi = (phi - state.b - dmin) / mu;
    const double th = invert_monotone(eta, eta_theta, phi, lo, hi);
    snap.u[j] = U(th);
    snap.u_theta[j] = Ux(th);
    snap.u_theta_theta[j] = Uxx(th);
  }
  snap.m = params.sigma() - snap.u_theta_theta;
  return snap;
}

double pde_residual(const EulerianSnapshot& before, const EulerianSnapshot& mid,
                    const EulerianSnapshot& after, const ModelParams& params) {
  const double h = after.t - mid.t;
  const double h0 = mid.t - before.t;
  if (!(h > 0.0) || std::abs(h - h0) > 1e-9 * std::max(1.0, mid.t)) {
    throw std::invalid_argument("pde_residual: snapshots must be equally spaced in time");
  }
  const double lambda = params.lambda();
  const double sigma = params.sigma();
  const Field& u = mid.u;
  const Field& ux = mid.u_theta;
  const Field& uxx = mid.u_theta_theta;
  const double E = mean(ux * ux);
  const double I = 0.5 * (lambda - 3.0) * E - lambda * sigma * sigma;
  double worst = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double utx = (after.u_theta[j] - before.u_theta[j]) / (2.0 * h);
    const double r = utx + u[j] * uxx[j] + 0.5 * (lambda - 1.0) * ux[j] * ux[j] -
                     lambda * sigma * u[j] - I;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

ConservedQuantities conserved_quantities(const EulerianSnapshot& s) {
  return {mean(s.u), mean(s.u_theta * s.u_theta), mean(s.u * s.u)};
}

double vorticity_transport_check(const SolarState& state, const EulerianSnapshot& snapshot,
                                 const ModelParams& params, const Field& m0) {
  if (!(state.x.min() > 0.0)) throw ReconstructionError("vorticity_transport_check: min x <= 0");
  const PeriodicInterpolant m(snapshot.m);
  const double p = params.gamma() * params.lambda();
  double worst = 0.0;
  for (std::size_t j = 0; j < m0.size(); ++j) {
    const double weight = std::pow(state.x[j], p);
    worst = std::max(worst, std::abs(weight * m(snapshot.eta[j]) - m0[j]));
  }
  return worst;
}

std::string to_string(McKeanKind k) {
  switch (k) {
    case McKeanKind::Global: return "global";
    case McKeanKind::Breakdown: return "breakdown";
    case McKeanKind::SigmaZeroSpecial: return "sigma_zero_special";
  }
  return "global";
}

std::vector<double> sign_crossings(const Field& f, bool falling, double sign_band) {
  const std::size_t n = f.size();
  const double eps = sign_band * f.max_abs();
  auto sign_at = [&](std::size_t j) {
    const double v = f[j % n];
    return v > eps ? 1 : (v < -eps ? -1 : 0);
  };
  std::size_t start = n;
  for (std::size_t j = 0; j < n; ++j) {
    if (sign_at(j) != 0) {
      start = j;
      break;
    }
  }
  std::vector<double> out;
  if (start == n) return out;
  const PeriodicInterpolant interp(f);
  const PeriodicGrid& g = f.grid();
  std::size_t prev = start;
  for (std::size_t step = 1; step <= n; ++step) {
    const std::size_t j = start + step;
    const int s = sign_at(j);
    if (s == 0) continue;
    const int sp = sign_at(prev);
    if (s != sp && (falling ? sp > 0 : sp < 0)) {
      double lo = g.theta(0) + static_cast<double>(prev) * g.spacing();
      double hi = static_cast<double>(j) * g.spacing();
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((interp(mid) > 0.0) == (sp > 0) ? lo : hi) = mid;
      }
      out.push_back(wrap01(0.5 * (lo + hi)));
    }
    prev = j;
  }
  std::sort(out.begin(), out.end());
  return out;
}

McKeanVerdict mckean_classify(const Field& u0, double lambda, double sign_band) {
  const double sigma = mean(u0);
  const ModelParams params(lambda, sigma);  // rejects lambda = 1
  McKeanVerdict v;
  v.advisory = !(lambda == 2.0 || lambda == 3.0);

  if (sigma < 0.0) {
    McKeanVerdict r = mckean_classify(-reflect(u0), lambda, sign_band);
    for (double& th : r.theta_star_candidates) th = wrap01(1.0 - th);
    std::sort(r.theta_star_candidates.begin(), r.theta_star_candidates.end());
    r.reflected = true;
    r.note = "classified through the reflection v0 = -u0(1 - theta); " + r.note;
    return r;
  }

  const Field m0 = initial_momentum(u0);
  const double scale = m0.max_abs();
  const bool constant = (u0 - sigma).max_abs() <= 1e-14 * std::max(1.0, std::abs(sigma));
  if (constant) {
    v.kind = McKeanKind::Global;
    v.note = "constant data: rigid rotation";
    return v;
  }
  if (sigma == 0.0) {
    v.kind = McKeanKind::SigmaZeroSpecial;
    v.theta_star_candidates = sign_crossings(m0, true, sign_band);
    if (lambda == 2.0) {
      v.note = "sigma = 0, lambda = 2: every nonconstant solution breaks down";
    } else if (lambda == 3.0) {
      v.note = "sigma = 0, lambda = 3: every nonconstant solution forms a shock";
    } else {
      v.note = "sigma = 0: no verdict outside lambda in {2, 3}";
    }
    return v;
  }
  const double eps = sign_band * scale;
  if (m0.min() >= -eps || m0.max() <= eps) {
    v.kind = McKeanKind::Global;
    v.note = "m0 keeps one sign";
  } else {
    v.kind = McKeanKind::Breakdown;
    v.theta_star_candidates = sign_crossings(m0, true, sign_band);
    v.note = "m0 changes sign";
  }
  if (v.advisory) v.note += " (advisory only: lambda outside {2, 3})";
  return v;
}

LemmaMonitorReport lemma_monitors(const RunOutput& run, const LemmaMonitorOptions& opt) {
  const ModelParams& params = run.params;
  const double gamma = params.gamma();
  if (!(gamma > 0.0)) throw std::invalid_argument("lemma_monitors: requires gamma > 0");
  if (run.samples.empty()) {
    throw std::invalid_argument("lemma_monitors: run has no stored states (keep_states)");
  }
  LemmaMonitorReport rep;
  double sigma = params.sigma();
  if (sigma == 0.0) {
    rep.note = "sigma = 0: lemma hypotheses need sigma > 0";
    return rep;
  }
  const bool flip = sigma < 0.0;
  const Field m0 = flip ? -reflect(run.m0) : run.m0;
  sigma = std::abs(sigma);

  const auto falls = sign_crossings(m0, true, opt.sign_band);
  const auto rises = sign_crossings(m0, false, opt.sign_band);
  if (falls.empty() || rises.empty()) {
    rep.note = "m0 has no negative interval";
    return rep;
  }
  // Longest interval (a, d) on which m0 < 0.
  double best = -1.0;
  for (double a : falls) {
    double d = std::numeric_limits<double>::infinity();
    for (double r : rises) {
      const double cand = r > a ? r : r + 1.0;
      d = std::min(d, cand);
    }
    if (d - a > best) {
      best = d - a;
      rep.a = a;
      rep.d = d;
    }
  }
  const PeriodicGrid grid = m0.grid();
  if (rep.d - rep.a < 4.0 * grid.spacing()) {
    throw std::invalid_argument("lemma_monitors: negative interval of m0 shorter than 4 cells");
  }
  rep.applicable = true;
  rep.b = rep.a + opt.b_fraction * (rep.d - rep.a);
  rep.c = rep.a + opt.c_fraction * (rep.d - rep.a);

  const PeriodicInterpolant m0i(m0);
  const double A = std::pow(2.0 / gamma, gamma / (gamma + 2.0)) * (1.0 / gamma + 0.5);
  rep.M = A * std::pow(sigma, 2.0 / (gamma + 2.0)) *
          integrate_gauss([&](double th) { return std::pow(std::abs(m0i(th)), gamma / (gamma + 2.0)); },
                          rep.b, rep.c);
  const double ab = rep.b - rep.a;
  const double root_int = integrate_gauss(
      [&](double s) { return std::sqrt(std::abs(m0i(rep.a + ab * s * s))) * 2.0 * ab * s; }, 0.0,
      1.0);
  rep.N = 2.0 / gamma * root_int * root_int;

  const double inf = std::numeric_limits<double>::infinity();
  rep.monotone_margin = rep.upper_bound_margin = rep.decay_margin = rep.integral_bound_margin = inf;
  const double x_cap = std::pow(rep.d - rep.c, -1.0 / gamma);
  const GaussRule rule = gauss_legendre(64);

  const std::size_t n = grid.size();
  const auto first = static_cast<std::size_t>(std::floor(rep.a * static_cast<double>(n))) + 1;
  const auto last = static_cast<std::size_t>(std::ceil(rep.d * static_cast<double>(n))) - 1;

  for (const SolarState& raw : run.samples) {
    if (run.breakdown.occurred && raw.t >= run.breakdown.T) continue;
    if (!(raw.x.min() > 0.0)) continue;
    const SolarState s = flip ? reflect(raw) : raw;
    const PeriodicInterpolant x(s.x);
    ++rep.samples_checked;

    double prev = x(rep.a);
    for (std::size_t j = first; j <= last; ++j) {
      const double cur = s.x[j % n];
      rep.monotone_margin = std::min(rep.monotone_margin, cur - prev);
      prev = cur;
    }
    rep.monotone_margin = std::min(rep.monotone_margin, x(rep.d) - prev);

    const double xb = x(rep.b);
    const double xc = x(rep.c);
    rep.upper_bound_margin = std::min(rep.upper_bound_margin, x_cap - xc);
    rep.decay_margin = std::min(rep.decay_margin, xc * std::exp(-rep.M * s.t) - xb);

    if (s.t <= 0.0) continue;
    const PeriodicInterpolant v(s.v);
    const PeriodicInterpolant y(s.y);
    const PeriodicInterpolant w(s.w);
    double lhs = 0.0;
    double rhs = 0.0;
    bool valid = true;
    for (std::size_t i = 0; i < rule.nodes.size() && valid; ++i) {
      const double th = rep.a + 0.5 * ab * (rule.nodes[i] + 1.0);
      const double xv = x(th);
      const double yv = y(th);
      if (!(xv > 0.0) || !(yv < 0.0)) {
        valid = false;
        break;
      }
      lhs += rule.weights[i] * v(th) / xv;
      rhs += rule.weights[i] * w(th) / yv;
    }
    if (!valid) continue;
    lhs *= 0.5 * ab;
    rhs *= 0.5 * ab;
    ++rep.integral_samples_checked;
    rep.integral_bound_margin =
        std::min(rep.integral_bound_margin, rhs - rep.N / (xb * xb) - lhs);
  }
  rep.monotone_ok = rep.monotone_margin >= -opt.tol;
  rep.upper_bound_ok = rep.upper_bound_margin >= -opt.tol;
  rep.decay_ok = rep.decay_margin >= -opt.tol;
  rep.integral_ok = rep.integral_bound_margin >= -opt.tol;
  return rep;
}

}  // namespace solar

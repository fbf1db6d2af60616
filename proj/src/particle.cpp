#include "solar/particle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "solar/errors.hpp"

namespace solar {

namespace {

struct Deriv {
  double dx, dvx, dy, dvy;
};

Deriv eval(const ParticleState& p, double f) { return {p.vx, f * p.x, p.vy, f * p.y}; }

ParticleState advance(const ParticleState& p, double h, const Deriv& k) {
  return {p.x + h * k.dx, p.vx + h * k.dvx, p.y + h * k.dy, p.vy + h * k.dvy};
}

// Root of the cubic Hermite interpolant of x on [t0, t1].
double hermite_root(double t0, double x0, double v0, double t1, double x1, double v1) {
  const double h = t1 - t0;
  auto value = [&](double s) {
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * x0 + (s3 - 2 * s2 + s) * h * v0 + (-2 * s3 + 3 * s2) * x1 +
           (s3 - s2) * h * v1;
  };
  double lo = 0.0;
  double hi = 1.0;
  double flo = value(lo);
  if (x1 == 0.0) return t1;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = value(mid);
    if ((fm > 0) == (flo > 0) && fm != 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return t0 + 0.5 * (lo + hi) * h;
}

}  // namespace

double ParticleState::radius() const noexcept { return std::hypot(x, y); }

ParticleTrajectory particle_integrate(const ForceLaw& force, ParticleState p0, double t_end,
                                      double dt) {
  if (!(dt > 0.0) || !(t_end > 0.0)) {
    throw std::invalid_argument("particle_integrate: dt and t_end must be positive");
  }
  ParticleTrajectory traj;
  traj.samples.push_back({0.0, p0});

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  ParticleState p = p0;
  double t = 0.0;
  auto force_at = [&](double s) {
    const double f = force(s);
    if (!std::isfinite(f)) {
      if (s >= t_end) return std::numeric_limits<double>::quiet_NaN();
      throw NumericalError("particle_integrate: non-finite force before t_end");
    }
    return f;
  };

  for (std::size_t i = 0; i < steps; ++i) {
    const double t_next = std::min(t_end, static_cast<double>(i + 1) * dt);
    const double h = t_next - t;
    const double f1 = force_at(t);
    const double f2 = force_at(t + 0.5 * h);
    const double f4 = force_at(t_next);
    if (std::isnan(f1) || std::isnan(f2) || std::isnan(f4)) {
      traj.reached_end = false;
      break;
    }
    const Deriv k1 = eval(p, f1);
    const Deriv k2 = eval(advance(p, 0.5 * h, k1), f2);
    const Deriv k3 = eval(advance(p, 0.5 * h, k2), f2);
    const Deriv k4 = eval(advance(p, h, k3), f4);
    p.x += h / 6.0 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
    p.vx += h / 6.0 * (k1.dvx + 2 * k2.dvx + 2 * k3.dvx + k4.dvx);
    p.y += h / 6.0 * (k1.dy + 2 * k2.dy + 2 * k3.dy + k4.dy);
    p.vy += h / 6.0 * (k1.dvy + 2 * k2.dvy + 2 * k3.dvy + k4.dvy);
    t = t_next;
    traj.samples.push_back({t, p});
  }

  const auto& s = traj.samples;
  traj.min_r = s.front().p.radius();
  for (std::size_t i = 1; i < s.size(); ++i) {
    traj.min_r = std::min(traj.min_r, s[i].p.radius());
    const double xa = s[i - 1].p.x;
    const double xb = s[i].p.x;
    if ((xa > 0 && xb <= 0) || (xa < 0 && xb >= 0)) {
      traj.x_zero_crossings.push_back(
          hermite_root(s[i - 1].t, xa, s[i - 1].p.vx, s[i].t, xb, s[i].p.vx));
    }
    if (i + 1 < s.size()) {
      const double r0 = s[i - 1].p.radius();
      const double r1 = s[i].p.radius();
      const double r2 = s[i + 1].p.radius();
      if (r1 < r0 && r1 <= r2) traj.r_minima.push_back(s[i].t);
    }
  }
  return traj;
}

EnvelopeCheck riccati_envelope_check(const ParticleTrajectory& trajectory, const ForceLaw& f,
                                     double tol) {
  if (trajectory.samples.empty()) throw std::invalid_argument("riccati_envelope_check: empty");
  const auto& first = trajectory.samples.front().p;
  if (!(first.x > 0)) throw std::invalid_argument("riccati_envelope_check: x must stay positive");
  const double r0 = first.vx / first.x;
  EnvelopeCheck out{true, std::numeric_limits<double>::infinity()};
  for (const auto& s : trajectory.samples) {
    if (!(s.p.x > 0)) {
      throw std::invalid_argument("riccati_envelope_check: x must stay positive");
    }
    const double margin = std::max(r0, f(s.t)) - s.p.vx / s.p.x;
    out.worst_margin = std::min(out.worst_margin, margin);
  }
  out.ok = out.worst_margin >= -tol;
  return out;
}

}  // namespace solar

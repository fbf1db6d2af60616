#pragma once

#include <functional>
#include <vector>

namespace solar {

/// A single planar particle under a prescribed central force
/// x'' = F(t) x, y'' = F(t) y.
struct ParticleState {
  double x = 0.0;
  double vx = 0.0;
  double y = 0.0;
  double vy = 0.0;

  double angular_momentum() const noexcept { return x * vy - y * vx; }
  double radius() const noexcept;
};

using ForceLaw = std::function<double(double)>;

struct ParticleSample {
  double t = 0.0;
  ParticleState p;
};

struct ParticleTrajectory {
  std::vector<ParticleSample> samples;
  std::vector<double> x_zero_crossings;  // times where x changes sign
  std::vector<double> r_minima;          // times of interior local minima of r
  double min_r = 0.0;
  bool reached_end = true;  // false when the force was singular at t_end
};

/// Classical RK4 with fixed step dt on [0, t_end]. A non-finite force
/// before t_end is an error; at t_end itself it truncates the trajectory.
ParticleTrajectory particle_integrate(const ForceLaw& force, ParticleState p0, double t_end,
                                      double dt);

struct EnvelopeCheck {
  bool ok = false;
  double worst_margin = 0.0;
};

/// Checks x'/x <= max(x'(0)/x(0), f(t)) + tol at every sample, where f is
/// an increasing envelope with F <= f^2.
EnvelopeCheck riccati_envelope_check(const ParticleTrajectory& trajectory, const ForceLaw& f,
                                     double tol = 1e-9);

}  // namespace solar

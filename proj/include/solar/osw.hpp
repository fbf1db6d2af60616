#pragma once

#include <vector>

#include "solar/calculus.hpp"

namespace solar {

/// Eulerian vorticity m = H u_theta together with the Lagrangian flow it
/// generates. eta holds the flow map itself (eta - theta is periodic).
struct OswState {
  explicit OswState(PeriodicGrid grid);

  double t = 0.0;
  Field m;
  Field eta;
  Field eta_theta;
  Field psi;
  Field m0;  // initial vorticity, Lagrangian labels
  double lambda_osw = 0.0;
};

struct OswVelocity {
  Field u;
  Field u_theta;
};

/// u_theta = -H m and the zero-mean antiderivative u. Throws
/// std::invalid_argument when mean(m) is not zero.
OswVelocity osw_velocity(const Field& m);

/// Initial state for u0 (mean(u0) must vanish); m0 is dealiased.
OswState osw_initial_state(const Field& u0, double lambda_osw);

/// Highest retained wavenumber of the 2/3 rule.
std::size_t osw_dealias_cutoff(std::size_t n);

/// One RK4 step. Throws ManifoldError once eta_theta <= 0 for lambda_osw > 0.
OswState osw_step(const OswState& state, double dt);

/// F = -u u_tt - H(u H u_tt), sampled on the grid of twice the size of u's
/// so that the quadratic products are exact for band-limited u.
Field osw_force(const Field& u);

/// max |eta_theta^lambda m(eta) - m0|.
double osw_vorticity_transport_error(const OswState& state);

struct ErmakovResiduals {
  double rho_residual = 0.0;     // absolute
  double rho_relative = 0.0;     // pointwise residual over the size of the terms
  double linear_residual = 0.0;  // absolute, max over x and y
  double linear_relative = 0.0;
  double angular_momentum_error = 0.0;  // max |x y_t - y x_t - lambda m0 / 2|
  double min_force = 0.0;
};

/// Central-difference check of the radial equation and of the linear solar
/// equations for x = rho cos psi, y = rho sin psi, with rho = eta_theta^(lambda/2).
/// The three states must be equally spaced in time.
ErmakovResiduals ermakov_check(const OswState& before, const OswState& mid,
                               const OswState& after);

/// max over t in the samples and theta with |m0| > delta of
/// eta_theta - (1 + u0'^2 / m0^2). Requires lambda_osw = -1.
double degregorio_bound_check(const std::vector<OswState>& samples, const Field& u0,
                              double delta);

struct OswConfig {
  std::size_t n = 512;
  double dt = 5e-4;
  double t_end = 1.0;
  std::size_t sample_every = 20;
  double stop_eta_theta = 0.01;  // lambda_osw > 0 runs stop once min eta_theta reaches this
  std::size_t ermakov_stride = 2;
  double bound_delta_fraction = 0.1;  // delta = fraction * max |m0|
  bool keep_states = false;

  void validate() const;
};

struct OswSeriesRow {
  double t = 0.0;
  double min_eta_theta = 0.0;
  double max_eta_theta = 0.0;
  double mean_m = 0.0;
  double min_force = 0.0;
  double vorticity_err = 0.0;
};

struct OswRunOutput {
  double lambda_osw = 0.0;
  OswConfig config;
  Field u0;
  Field m0;
  OswState final_state;
  std::vector<OswSeriesRow> series;
  std::vector<OswState> samples;

  double min_force = 0.0;             // over every step and grid point
  bool force_positive = true;
  bool reached_stop = false;          // min eta_theta <= stop_eta_theta
  double stop_time = 0.0;
  bool min_eta_theta_monotone = true; // nonincreasing step to step
  double max_vorticity_err = 0.0;
  double mean_m_drift = 0.0;
  ErmakovResiduals ermakov;           // worst over all windows
  std::size_t ermakov_windows = 0;
  double degregorio_margin = 0.0;     // only for lambda_osw = -1
  bool degregorio_checked = false;
};

OswRunOutput integrate_osw(const Field& u0, double lambda_osw, const OswConfig& config);

}  // namespace solar

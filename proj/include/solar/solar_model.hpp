#pragma once

#include "solar/calculus.hpp"

namespace solar {

/// Family parameter lambda, conserved mean sigma, and gamma = 2/(lambda - 1).
class ModelParams {
 public:
  /// Throws std::invalid_argument for lambda == 1, where gamma is singular.
  ModelParams(double lambda, double sigma, double positivity_floor = 1e-10);

  double lambda() const noexcept { return lambda_; }
  double sigma() const noexcept { return sigma_; }
  double gamma() const noexcept { return gamma_; }

  /// States with min x below this floor are rejected when x may not change sign.
  double positivity_floor() const noexcept { return positivity_floor_; }

  /// True when gamma is a positive integer, so x^gamma stays smooth through x = 0.
  bool allows_sign_change() const noexcept;

  /// Coefficient of G in F: lambda (lambda - 1) sigma / 2.
  double g_coefficient() const noexcept;
  /// Coefficient of E in F: (lambda - 1)(lambda - 3) / 4.
  double e_coefficient() const noexcept;

 private:
  double lambda_;
  double sigma_;
  double gamma_;
  double positivity_floor_;
};

/// Phase point of the central-force system: every theta carries a planar
/// particle (x, y) with velocity (v, w). A is the running integral of
/// x^gamma in time and b the base point eta(t, 0).
struct SolarState {
  explicit SolarState(PeriodicGrid grid);

  double t = 0.0;
  Field x;
  Field v;
  Field y;
  Field w;
  Field A;
  double b = 0.0;
};

/// Time derivative of a SolarState.
struct SolarTangent {
  Field dx;
  Field dv;
  Field dy;
  Field dw;
  Field dA;
  double db = 0.0;
};

struct ForcingDiagnostics {
  double E = 0.0;  // kinetic energy, the integral of u_theta^2
  Field G;         // eta_t - sigma in Lagrangian labels
  Field F;         // central force coefficient
};

struct ConstraintResiduals {
  double c1 = 0.0;  // |mean(x^gamma) - 1|
  double c2 = 0.0;  // |mean(G x^gamma)|
  double c3 = 0.0;  // max |y - (-gamma x_theta + sigma x A)|
};

/// x^(gamma + shift); integer exponents use repeated multiplication so
/// negative x is allowed.
Field gamma_power(const Field& x, const ModelParams& params, int shift = 0);

/// m0 = sigma - u0'' with sigma = mean(u0).
Field initial_momentum(const Field& u0);

SolarState initial_state(const Field& u0, const ModelParams& params);

/// E, G and F for the current state.
///
/// G is normalized so that G_theta = gamma x^(gamma-1) x_t (= eta_{t theta})
/// with zero x^gamma-weighted mean, i.e. G = eta_t - sigma.
ForcingDiagnostics forcing(const SolarState& state, const ModelParams& params);

SolarTangent rhs(const SolarState& state, const ModelParams& params);

/// x w - y v, which equals m0 for every exact solution.
Field angular_momentum(const SolarState& state);

ConstraintResiduals constraint_residuals(const SolarState& state, const ModelParams& params);

/// State of the reflected solution v(t, theta) = -u(t, 1 - theta).
SolarState reflect(const SolarState& state);

}  // namespace solar

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "solar/calculus.hpp"
#include "solar/solar_model.hpp"

namespace solar {

struct RunConfig {
  std::size_t n = 256;
  double dt = 1e-3;
  double t_end = 1.0;
  std::size_t sample_every = 10;
  double event_refine_tol = 1e-10;
  bool continuation = false;  // integrate past breakdown (positive integer gamma only)
  bool keep_states = true;    // store the sampled SolarStates in RunOutput
  double sign_band = 1e-9;    // eps_sign relative to max |m0|

  void validate() const;
};

/// How m0 behaves around the breakdown location.
enum class SignTransition { PlusToMinus, MinusToPlus, InteriorNegative, InteriorPositive, Zero };

std::string to_string(SignTransition s);

struct BreakdownReport {
  bool occurred = false;
  double T = 0.0;           // first time min_theta x = 0
  double theta_star = 0.0;  // grid argmin of x at T
  std::size_t index = 0;    // grid index of theta_star
  SignTransition sign_transition = SignTransition::Zero;
  double bracket_width = 0.0;
  int bisection_steps = 0;
  bool manifold_exit = false;  // stopped at the positivity floor (non-integer gamma)
  std::vector<std::pair<double, double>> min_x_history;  // (t, min x) at samples
};

struct SeriesRow {
  double t = 0.0;
  double min_x = 0.0;
  double E = 0.0;
  double L2 = 0.0;     // integral of u^2 in Lagrangian form
  double sigma = 0.0;  // integral of u in Lagrangian form
  double angmom_err_max = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

enum class RunStatus { Completed, StoppedAtBreakdown, ManifoldExit };

struct RunOutput {
  ModelParams params;
  RunConfig config;
  Field u0;
  Field m0;
  std::vector<SeriesRow> series;
  std::vector<SolarState> samples;  // empty unless config.keep_states
  SolarState final_state;
  BreakdownReport breakdown;
  RunStatus status = RunStatus::Completed;
};

/// One classical RK4 step of every state component.
SolarState step_rk4(const SolarState& state, const ModelParams& params, double dt);

/// Diagnostics row for a state.
SeriesRow diagnose(const SolarState& state, const ModelParams& params, const Field& m0);

/// Integrates from u0 to config.t_end, stopping at breakdown unless
/// continuation is enabled and gamma is a positive integer.
RunOutput integrate(const Field& u0, const ModelParams& params, const RunConfig& config);

/// Locates the first zero of min_theta x after `checkpoint` by bisection
/// on the step length in (0, max_step], re-integrating from the checkpoint
/// each time. Throws NumericalError when the step does not bracket a sign
/// change.
BreakdownReport refine_breakdown(const SolarState& checkpoint, const ModelParams& params,
                                 double max_step, double tol, const Field& m0,
                                 double sign_band = 1e-9);

/// Classifies the sign pattern of m0 around grid index j.
SignTransition classify_transition(const Field& m0, std::size_t j, double sign_band);

}  // namespace solar

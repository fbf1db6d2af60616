#pragma once

#include <string>
#include <vector>

#include "solar/calculus.hpp"
#include "solar/integrator.hpp"
#include "solar/solar_model.hpp"

namespace solar {

/// Eulerian fields recovered from a SolarState on the uniform grid.
struct EulerianSnapshot {
  double t = 0.0;
  Field eta;      // b + integral of x^gamma, in Lagrangian labels
  Field u;        // velocity at the Eulerian grid points
  Field u_theta;
  Field u_theta_theta;  // chain rule on the Lagrangian side: (gamma v / x)_theta / x^gamma
  Field m;              // sigma - u_theta_theta
};

/// Thrown when min x <= 0 and the flow map is no longer invertible.
class ReconstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inverts the flow map and evaluates u, u_theta and m on the Eulerian grid.
EulerianSnapshot reconstruct(const SolarState& state, const ModelParams& params);

/// Max over theta of |u_t_theta + u u_theta_theta + (lambda-1)/2 u_theta^2 - lambda sigma u - I|,
/// with u_t_theta from central differences over the three snapshots.
double pde_residual(const EulerianSnapshot& before, const EulerianSnapshot& mid,
                    const EulerianSnapshot& after, const ModelParams& params);

struct ConservedQuantities {
  double sigma = 0.0;  // mean(u)
  double E = 0.0;      // mean(u_theta^2)
  double L2 = 0.0;     // mean(u^2)
};

ConservedQuantities conserved_quantities(const EulerianSnapshot& snapshot);

/// Max over theta of |x^(gamma lambda) m(eta(theta)) - m0(theta)|.
double vorticity_transport_check(const SolarState& state, const EulerianSnapshot& snapshot,
                                 const ModelParams& params, const Field& m0);

enum class McKeanKind { Global, Breakdown, SigmaZeroSpecial };

std::string to_string(McKeanKind k);

struct McKeanVerdict {
  McKeanKind kind = McKeanKind::Global;
  std::vector<double> theta_star_candidates;  // + to - crossings of m0, original labels
  bool reflected = false;  // sigma < 0: classified through v0 = -u0(1 - theta)
  bool advisory = false;   // lambda outside {2, 3}
  std::string note;
};

/// Sign test on m0 = sigma - u0''. Throws std::invalid_argument for lambda = 1.
McKeanVerdict mckean_classify(const Field& u0, double lambda, double sign_band = 1e-9);

struct LemmaMonitorOptions {
  double tol = 1e-4;
  double b_fraction = 1.0 / 3.0;  // b = a + b_fraction (d - a)
  double c_fraction = 2.0 / 3.0;
  double sign_band = 1e-9;
};

struct LemmaMonitorReport {
  bool applicable = false;
  std::string note;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double M = 0.0;
  double N = 0.0;
  double monotone_margin = 0.0;       // min increment of x along [a, d]
  double upper_bound_margin = 0.0;    // min of (d-c)^(-1/gamma) - x(t, c)
  double decay_margin = 0.0;          // min of x(t, c) e^(-M t) - x(t, b)
  double integral_bound_margin = 0.0; // min of rhs - lhs of the interval inequality
  bool monotone_ok = false;
  bool upper_bound_ok = false;
  bool decay_ok = false;
  bool integral_ok = false;
  std::size_t samples_checked = 0;
  std::size_t integral_samples_checked = 0;

  bool all_ok() const noexcept {
    return !applicable || (monotone_ok && upper_bound_ok && decay_ok && integral_ok);
  }
};

/// Checks the breakdown inequalities on every stored sample with min x > 0.
/// Runs with sigma < 0 are reflected first. Needs RunConfig::keep_states.
LemmaMonitorReport lemma_monitors(const RunOutput& run, const LemmaMonitorOptions& options = {});

/// Roots of a periodic field's interpolant where it changes sign, by bisection
/// from grid brackets. `falling` selects + to - crossings, otherwise - to +.
std::vector<double> sign_crossings(const Field& f, bool falling, double sign_band = 1e-9);

}  // namespace solar

#pragma once

#include <optional>

#include "solar/calculus.hpp"
#include "solar/solar_model.hpp"

namespace solar {

/// Exact phase point (x, x_t, y, y_t) of a closed-form solution.
struct ClosedFormFields {
  Field x;
  Field v;
  Field y;
  Field w;
};

/// Inviscid Burgers (sigma = 0, lambda = 3): x = 1 + t u0', y = -t u0''.
ClosedFormFields burgers_solution(const Field& u0, double t);

/// K = sqrt(mean(u0'^2)) / 2 for the Hunter-Saxton solution.
double hs_frequency(const Field& u0);

/// Hunter-Saxton (sigma = 0, lambda = 2): simple harmonic motion at frequency K.
ClosedFormFields hs_solution(const Field& u0, double t);

/// First positive time at which x(t, theta) vanishes for some theta, i.e.
/// atan(2K / |min u0'|) / K. Empty for constant u0.
std::optional<double> hs_breakdown_time(const Field& u0);

/// Rigid rotation eta = theta + c t.
SolarState constant_solution(PeriodicGrid grid, double c, double t);

}  // namespace solar

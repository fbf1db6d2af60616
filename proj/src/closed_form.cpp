#include "solar/closed_form.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace solar {

namespace {

void require_mean_zero(const Field& u0, const char* op) {
  const double sigma = mean(u0);
  if (std::abs(sigma) > 1e-12) {
    std::ostringstream msg;
    msg << op << ": requires mean(u0) = 0, got " << sigma;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

ClosedFormFields burgers_solution(const Field& u0, double t) {
  require_mean_zero(u0, "burgers_solution");
  const Field d1 = derivative(u0);
  const Field d2 = derivative(d1);
  return {1.0 + t * d1, d1, -t * d2, -d2};
}

double hs_frequency(const Field& u0) {
  const Field d1 = derivative(u0);
  return 0.5 * std::sqrt(mean(d1 * d1));
}

ClosedFormFields hs_solution(const Field& u0, double t) {
  require_mean_zero(u0, "hs_solution");
  const double K = hs_frequency(u0);
  if (!(K > 0.0)) throw std::invalid_argument("hs_solution: K = 0 for constant u0");
  const Field d1 = derivative(u0);
  const Field d2 = derivative(d1);
  const double c = std::cos(K * t);
  const double s = std::sin(K * t);
  return {c + (s / (2.0 * K)) * d1, -K * s + (0.5 * c) * d1, (-s / K) * d2, -c * d2};
}

std::optional<double> hs_breakdown_time(const Field& u0) {
  require_mean_zero(u0, "hs_breakdown_time");
  const double K = hs_frequency(u0);
  if (!(K > 0.0)) return std::nullopt;
  const double slope = -derivative(u0).min();
  return std::atan2(2.0 * K, slope) / K;
}

SolarState constant_solution(PeriodicGrid grid, double c, double t) {
  SolarState s(grid);
  s.t = t;
  s.y = Field(grid, c * t);
  s.w = Field(grid, c);
  s.A = Field(grid, t);
  s.b = c * t;
  return s;
}

}  // namespace solar

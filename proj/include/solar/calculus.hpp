#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace solar {

/// Uniform samples theta_j = j/n of the unit circle R/Z.
///
/// n must be even and at least 8; the Fourier-multiplier operators below
/// rely on a well-defined Nyquist mode.
class PeriodicGrid {
 public:
  explicit PeriodicGrid(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return 1.0 / static_cast<double>(n_); }
  double theta(std::size_t j) const noexcept {
    return static_cast<double>(j) / static_cast<double>(n_);
  }

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;

 private:
  std::size_t n_;
};

/// Real samples of a function on a PeriodicGrid.
class Field {
 public:
  explicit Field(PeriodicGrid grid, double value = 0.0);
  Field(PeriodicGrid grid, std::vector<double> values);

  static Field sample(PeriodicGrid grid, const std::function<double(double)>& f);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator[](std::size_t j) { return values_[j]; }
  double operator[](std::size_t j) const { return values_[j]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool all_finite() const noexcept;
  double min() const;
  double max() const;
  double max_abs() const;
  std::size_t argmin() const;

  template <class Fn>
  Field map(Fn&& fn) const {
    Field out(grid_);
    for (std::size_t j = 0; j < values_.size(); ++j) out.values_[j] = fn(values_[j]);
    return out;
  }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(const Field& other);
  Field& operator+=(double c);
  Field& operator*=(double c);

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Field a, const Field& b);
Field operator+(Field a, double c);
Field operator-(Field a, double c);
Field operator*(Field a, double c);
Field operator*(double c, Field a);
Field operator+(double c, Field a);
Field operator-(double c, Field a);
Field operator-(Field a);

/// a + h*b, the axpy used by the explicit integrators.
Field axpy(const Field& a, double h, const Field& b);

/// f(1 - theta): sample j maps to sample (n - j) mod n.
Field reflect(const Field& f);

/// Pairwise (cascade) summation with a fixed association order.
double pairwise_sum(std::span<const double> values);

/// Full-circle integral of f by the periodic trapezoid rule.
double mean(const Field& f);

/// Spectral derivative (multiplier 2*pi*i*k, Nyquist mode zeroed).
Field derivative(const Field& f);

/// F(theta) = integral of f over [0, theta]; F(0) = 0.
Field cumulative_integral(const Field& f);

/// Hilbert transform, multiplier -i*sgn(k); zero and Nyquist modes map to zero.
Field hilbert(const Field& f);

/// Normalized coefficients c_k, k = 0..n/2, with f(theta) = sum_k c_k e^{2 pi i k theta}.
std::vector<std::complex<double>> spectrum(const Field& f);

/// Inverse of spectrum(): samples the trigonometric series on `grid`.
Field synthesize(PeriodicGrid grid, std::span<const std::complex<double>> coeffs);

/// Band-limited transfer of f to another grid: zero padding when refining,
/// truncation (Nyquist mode dropped) when coarsening.
Field resample(const Field& f, PeriodicGrid target);

/// Keeps the modes with |k| <= kmax and zeroes the rest.
Field lowpass(const Field& f, std::size_t kmax);

/// Evaluates the trigonometric interpolant of a Field at arbitrary points.
///
/// The Field is band-limited onto an oversampled grid (zero padding) and
/// then interpolated locally with an 8-point barycentric Lagrange stencil,
/// which is accurate to near round-off for resolved fields at O(1) cost per
/// evaluation.
class PeriodicInterpolant {
 public:
  explicit PeriodicInterpolant(const Field& f, std::size_t oversample = 8);

  double operator()(double theta) const;

 private:
  std::vector<double> fine_;
};

}  // namespace solar

#include "solar/calculus.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace solar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// The FFTW planner is not thread-safe; plan execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FourierPlan {
 public:
  explicit FourierPlan(std::size_t n) : n_(n) {
    real_ = fftw_alloc_real(n);
    spec_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard lock(planner_mutex());
    const int ni = static_cast<int>(n);
    forward_ = fftw_plan_dft_r2c_1d(ni, real_, spec_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(ni, spec_, real_, FFTW_ESTIMATE);
  }

  FourierPlan(const FourierPlan&) = delete;
  FourierPlan& operator=(const FourierPlan&) = delete;

  ~FourierPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(real_);
    fftw_free(spec_);
  }

  // out[k] = (1/n) sum_j in[j] exp(-2 pi i j k / n)
  void forward(std::span<const double> in, std::span<std::complex<double>> out) {
    std::copy(in.begin(), in.end(), real_);
    fftw_execute(forward_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t k = 0; k <= n_ / 2; ++k) {
      out[k] = std::complex<double>(spec_[k][0], spec_[k][1]) * scale;
    }
  }

  // out[j] = sum_k in[k] exp(2 pi i j k / n), Hermitian extension implied.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) {
    for (std::size_t k = 0; k <= n_ / 2; ++k) {
      spec_[k][0] = in[k].real();
      spec_[k][1] = in[k].imag();
    }
    fftw_execute(inverse_);
    std::copy(real_, real_ + n_, out.begin());
  }

 private:
  std::size_t n_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

FourierPlan& plan_for(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<FourierPlan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FourierPlan>(n);
  return *slot;
}

void require_finite(const Field& f, const char* op) {
  if (!f.all_finite()) {
    throw std::domain_error(std::string(op) + ": non-finite field value");
  }
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) {
    throw std::invalid_argument("field grids differ");
  }
}

template <class Multiplier>
Field apply_multiplier(const Field& f, Multiplier&& mult) {
  auto c = spectrum(f);
  const std::size_t half = f.size() / 2;
  for (std::size_t k = 0; k <= half; ++k) c[k] = mult(k, c[k]);
  return synthesize(f.grid(), c);
}

double pairwise_sum_impl(const double* p, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum_impl(p, h) + pairwise_sum_impl(p + h, n - h);
}

}  // namespace

PeriodicGrid::PeriodicGrid(std::size_t n) : n_(n) {
  if (n < 8 || n % 2 != 0) {
    throw std::invalid_argument("PeriodicGrid: n must be even and >= 8, got " + std::to_string(n));
  }
}

Field::Field(PeriodicGrid grid, double value) : grid_(grid), values_(grid.size(), value) {}

Field::Field(PeriodicGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("Field: expected " + std::to_string(grid_.size()) +
                                " samples, got " + std::to_string(values_.size()));
  }
}

Field Field::sample(PeriodicGrid grid, const std::function<double(double)>& f) {
  Field out(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) out[j] = f(grid.theta(j));
  return out;
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::size_t Field::argmin() const {
  return static_cast<std::size_t>(std::min_element(values_.begin(), values_.end()) -
                                  values_.begin());
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += other.values_[j];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= other.values_[j];
  return *this;
}

Field& Field::operator*=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] *= other.values_[j];
  return *this;
}

Field& Field::operator+=(double c) {
  for (double& v : values_) v += c;
  return *this;
}

Field& Field::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(Field a, const Field& b) { return a *= b; }
Field operator+(Field a, double c) { return a += c; }
Field operator-(Field a, double c) { return a += -c; }
Field operator*(Field a, double c) { return a *= c; }
Field operator*(double c, Field a) { return a *= c; }
Field operator+(double c, Field a) { return a += c; }
Field operator-(double c, Field a) { a *= -1.0; return a += c; }
Field operator-(Field a) { return a *= -1.0; }

Field axpy(const Field& a, double h, const Field& b) {
  require_same_grid(a, b);
  Field out(a.grid());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + h * b[j];
  return out;
}

Field reflect(const Field& f) {
  const std::size_t n = f.size();
  Field out(f.grid());
  for (std::size_t j = 0; j < n; ++j) out[j] = f[(n - j) % n];
  return out;
}

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum_impl(values.data(), values.size());
}

double mean(const Field& f) {
  require_finite(f, "mean");
  return pairwise_sum(f.values()) / static_cast<double>(f.size());
}

std::vector<std::complex<double>> spectrum(const Field& f) {
  std::vector<std::complex<double>> c(f.size() / 2 + 1);
  plan_for(f.size()).forward(f.values(), c);
  return c;
}

Field synthesize(PeriodicGrid grid, std::span<const std::complex<double>> coeffs) {
  if (coeffs.size() != grid.size() / 2 + 1) {
    throw std::invalid_argument("synthesize: coefficient count does not match grid");
  }
  Field out(grid);
  plan_for(grid.size()).inverse(coeffs, out.values());
  return out;
}

Field resample(const Field& f, PeriodicGrid target) {
  require_finite(f, "resample");
  const std::size_t n = f.size();
  const std::size_t m = target.size();
  if (m == n) return f;
  const auto c = spectrum(f);
  std::vector<std::complex<double>> out(m / 2 + 1);
  if (m > n) {
    std::copy(c.begin(), c.end(), out.begin());
    out[n / 2] = std::complex<double>(c[n / 2].real() * 0.5, 0.0);
  } else {
    std::copy(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(m / 2), out.begin());
  }
  return synthesize(target, out);
}

Field lowpass(const Field& f, std::size_t kmax) {
  require_finite(f, "lowpass");
  return apply_multiplier(f, [kmax](std::size_t k, std::complex<double> c) {
    return k <= kmax ? c : std::complex<double>{};
  });
}

Field derivative(const Field& f) {
  require_finite(f, "derivative");
  const std::size_t half = f.size() / 2;
  return apply_multiplier(f, [half](std::size_t k, std::complex<double> c) {
    if (k == half) return std::complex<double>{};
    return c * std::complex<double>(0.0, kTwoPi * static_cast<double>(k));
  });
}

Field cumulative_integral(const Field& f) {
  require_finite(f, "cumulative_integral");
  const std::size_t half = f.size() / 2;
  const double avg = mean(f);
  Field periodic = apply_multiplier(f, [half](std::size_t k, std::complex<double> c) {
    if (k == 0 || k == half) return std::complex<double>{};
    return c / std::complex<double>(0.0, kTwoPi * static_cast<double>(k));
  });
  const double origin = periodic[0];
  Field out(f.grid());
  for (std::size_t j = 0; j < f.size(); ++j) {
    out[j] = avg * f.grid().theta(j) + (periodic[j] - origin);
  }
  return out;
}

Field hilbert(const Field& f) {
  require_finite(f, "hilbert");
  const std::size_t half = f.size() / 2;
  return apply_multiplier(f, [half](std::size_t k, std::complex<double> c) {
    if (k == 0 || k == half) return std::complex<double>{};
    return c * std::complex<double>(0.0, -1.0);
  });
}

PeriodicInterpolant::PeriodicInterpolant(const Field& f, std::size_t oversample) {
  require_finite(f, "PeriodicInterpolant");
  if (oversample < 1) throw std::invalid_argument("PeriodicInterpolant: oversample < 1");
  const std::size_t n = f.size();
  const std::size_t m = n * oversample;
  auto c = spectrum(f);
  std::vector<std::complex<double>> padded(m / 2 + 1);
  std::copy(c.begin(), c.end(), padded.begin());
  // The Nyquist coefficient stands for cos(pi n theta); split it evenly
  // between +n/2 and -n/2 on the finer grid.
  if (oversample > 1) padded[n / 2] = std::complex<double>(c[n / 2].real() * 0.5, 0.0);
  fine_.resize(m);
  plan_for(m).inverse(padded, fine_);
}

double PeriodicInterpolant::operator()(double theta) const {
  static constexpr double kWeights[8] = {1.0, -7.0, 21.0, -35.0, 35.0, -21.0, 7.0, -1.0};
  const std::size_t m = fine_.size();
  double wrapped = theta - std::floor(theta);
  double pos = wrapped * static_cast<double>(m);
  auto base = static_cast<std::size_t>(std::floor(pos));
  double frac = pos - static_cast<double>(base);
  base %= m;
  if (frac == 0.0) return fine_[base];
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < 8; ++j) {
    const std::size_t idx = (base + m + static_cast<std::size_t>(j) - 3) % m;
    const double w = kWeights[j] / (frac - static_cast<double>(j - 3));
    num += w * fine_[idx];
    den += w;
  }
  return num / den;
}

}  // namespace solar

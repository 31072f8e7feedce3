#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mckle {

// A sorted sample with the split point between negative and nonnegative
// observations and the moments every objective needs. Immutable once built.
class Sample {
 public:
  // Sorts a copy of `raw`. Throws DataError on empty input or a non-finite
  // value.
  static Sample build(std::span<const double> raw);

  std::span<const double> obs() const { return obs_; }
  double operator[](std::size_t i) const { return obs_[i]; }
  std::size_t n() const { return obs_.size(); }
  // Number of strictly negative observations; obs()[k()] is the first
  // nonnegative one.
  std::size_t k() const { return k_; }

  double min() const { return obs_.front(); }
  double max() const { return obs_.back(); }
  double mean() const { return mean_; }
  double mean_abs() const { return mean_abs_; }
  double mean_sq() const { return mean_sq_; }
  // Average of x·log x; present only when every observation is > 0.
  std::optional<double> mean_xlogx() const { return mean_xlogx_; }
  // Population variance (denominator n), clamped at zero.
  double variance() const;

 private:
  Sample() = default;

  std::vector<double> obs_;
  std::size_t k_ = 0;
  double mean_ = 0.0;
  double mean_abs_ = 0.0;
  double mean_sq_ = 0.0;
  std::optional<double> mean_xlogx_;
};

inline Sample build_sample(std::span<const double> raw) { return Sample::build(raw); }

// Right-continuous empirical CDF: #{x_i <= x} / n.
double ecdf_eval(const Sample& sample, double x);

// Empirical survival function, 1 - ecdf_eval. Equals 1 below the minimum.
double esf_eval(const Sample& sample, double x);

// C_n = ∫_{-∞}^0 F_n log F_n dx + ∫_0^∞ F̄_n log F̄_n dx, summed exactly over
// the steps of F_n with 0·log 0 = 0. Always <= 0.
double empirical_entropy_constant(const Sample& sample);

}  // namespace mckle

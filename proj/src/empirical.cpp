#include "mckle/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mckle/errors.hpp"

namespace mckle {

Sample Sample::build(std::span<const double> raw) {
  if (raw.empty()) throw DataError("empty sample");
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) {
      throw DataError("non-finite observation at index " + std::to_string(i));
    }
  }

  Sample s;
  s.obs_.assign(raw.begin(), raw.end());
  std::sort(s.obs_.begin(), s.obs_.end());

  double sum = 0.0, sum_abs = 0.0, sum_sq = 0.0, sum_xlogx = 0.0;
  bool all_positive = true;
  std::size_t k = 0;
  for (double x : s.obs_) {
    sum += x;
    sum_abs += std::abs(x);
    sum_sq += x * x;
    if (x < 0.0) ++k;
    if (x > 0.0) {
      sum_xlogx += x * std::log(x);
    } else {
      all_positive = false;
    }
  }
  const double n = static_cast<double>(s.obs_.size());
  s.k_ = k;
  s.mean_ = sum / n;
  s.mean_abs_ = sum_abs / n;
  s.mean_sq_ = sum_sq / n;
  if (all_positive) s.mean_xlogx_ = sum_xlogx / n;
  return s;
}

double Sample::variance() const {
  // Two-pass for accuracy; mean_sq - mean² loses digits for large offsets.
  double acc = 0.0;
  for (double x : obs_) acc += (x - mean_) * (x - mean_);
  return acc / static_cast<double>(obs_.size());
}

double ecdf_eval(const Sample& sample, double x) {
  const auto obs = sample.obs();
  const auto count = std::upper_bound(obs.begin(), obs.end(), x) - obs.begin();
  return static_cast<double>(count) / static_cast<double>(obs.size());
}

double esf_eval(const Sample& sample, double x) { return 1.0 - ecdf_eval(sample, x); }

namespace {
double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }
}  // namespace

double empirical_entropy_constant(const Sample& sample) {
  const auto obs = sample.obs();
  const std::size_t n = obs.size();
  const double nd = static_cast<double>(n);
  double total = 0.0;
  // On [x_(i), x_(i+1)), F_n = i/n (1-based i). The region below x_(1) has
  // F_n = 0 and above x_(n) F̄_n = 0, so both contribute nothing.
  for (std::size_t i = 1; i < n; ++i) {
    const double lo = obs[i - 1];
    const double hi = obs[i];
    if (hi <= lo) continue;
    const double p = static_cast<double>(i) / nd;
    const double neg_len = std::max(0.0, std::min(hi, 0.0) - lo);
    const double pos_len = std::max(0.0, hi - std::max(lo, 0.0));
    total += neg_len * xlogx(p) + pos_len * xlogx(1.0 - p);
  }
  return total;
}

}  // namespace mckle

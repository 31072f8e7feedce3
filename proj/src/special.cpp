#include "mckle/special.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mckle/errors.hpp"

namespace mckle::special {

double normal_pdf(double z) { return std::exp(log_normal_pdf(z)); }

double log_normal_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / kSqrt2); }

namespace {

// 1 - 1/z² + 3/z⁴ - 15/z⁶ + ... : Φ(z) ≈ φ(z)/(-z) · series for z << 0.
double mills_series(double z) {
  const double w = 1.0 / (z * z);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 6; ++k) {
    term *= -static_cast<double>(2 * k - 1) * w;
    sum += term;
  }
  return sum;
}

constexpr double kAsymptoticCut = -30.0;

}  // namespace

double log_normal_cdf(double z) {
  if (z > 5.0) return std::log1p(-normal_sf(z));
  if (z > kAsymptoticCut) return std::log(normal_cdf(z));
  return log_normal_pdf(z) - std::log(-z) + std::log(mills_series(z));
}

double inverse_mills(double z) {
  if (z > kAsymptoticCut) return std::exp(log_normal_pdf(z) - log_normal_cdf(z));
  return -z / mills_series(z);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("probability must lie in (0,1), got " + std::to_string(p));
  }
  if (p > 0.5) return -normal_quantile(1.0 - p);

  // Acklam (2003), relative error 1.15e-9 before refinement.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }

  // Halley refinement. e/φ(x) computed in log space so the deep tail does not
  // overflow.
  const double e = normal_cdf(x) - p;
  const double u = e * std::exp(-log_normal_pdf(x));
  if (std::isfinite(u)) x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double dilog(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("dilog argument must lie in [0,1], got " + std::to_string(x));
  }
  if (x == 1.0) return kPi * kPi / 6.0;
  if (x > 0.5) {
    return kPi * kPi / 6.0 - std::log(x) * std::log1p(-x) - dilog(1.0 - x);
  }
  double sum = 0.0;
  double pw = x;
  for (int k = 1; k < 200; ++k) {
    const double term = pw / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
    pw *= x;
  }
  return sum;
}

double chi2_df1_cdf(double x) {
  if (x <= 0.0) return 0.0;
  return std::erf(std::sqrt(0.5 * x));
}

double chi2_df1_sf(double x) {
  if (x <= 0.0) return 1.0;
  return std::erfc(std::sqrt(0.5 * x));
}

double chi2_quantile_df1(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError("chi-square quantile level must lie in (0,1), got " + std::to_string(q));
  }
  const double z = normal_quantile(0.5 * (1.0 + q));
  return z * z;
}

}  // namespace mckle::special

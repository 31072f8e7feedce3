#pragma once

// Standard normal, chi-square(1) and dilogarithm helpers shared by the
// models and inference layers.

namespace mckle::special {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log √(2π)

double normal_pdf(double z);
double log_normal_pdf(double z);

// Φ and 1-Φ through std::erfc, which keeps full relative accuracy in the
// tail it is asked about (no 1 - Φ cancellation).
double normal_cdf(double z);
double normal_sf(double z);

// log Φ(z), finite for every finite z. Below z = -30 uses the asymptotic
// expansion of the Mills ratio.
double log_normal_cdf(double z);
inline double log_normal_sf(double z) { return log_normal_cdf(-z); }

// φ(z)/Φ(z), the derivative of log Φ.
double inverse_mills(double z);

// Φ⁻¹(p) for 0 < p < 1: Acklam's rational approximation followed by one
// Halley step against normal_cdf. Throws DomainError outside (0,1).
double normal_quantile(double p);

// Li₂(x) for 0 <= x <= 1.
double dilog(double x);

double chi2_df1_cdf(double x);
double chi2_df1_sf(double x);
// Lower-tail quantile: P(χ²₁ <= result) = q. Throws DomainError outside (0,1).
double chi2_quantile_df1(double q);

}  // namespace mckle::special

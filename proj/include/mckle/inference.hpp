#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mckle/empirical.hpp"
#include "mckle/linalg.hpp"
#include "mckle/models.hpp"
#include "mckle/solver.hpp"

namespace mckle {

enum class VarianceSource { closed_form, quadrature, sandwich };
std::string_view variance_source_name(VarianceSource s);

// A = Cov_θ[ψ(X, θ)], B = E_θ[∂ψ/∂θ] (the curvature of the population g),
// V_n = B⁻¹ A B⁻¹ / n. sigma2 = n·V_n for scalar families (A/B²), NaN
// otherwise. A and B are absent when only V_n has a closed form.
struct AsymptoticVariance {
  std::optional<Matrix> A;
  std::optional<Matrix> B;
  Matrix V_n;
  double sigma2;
  VarianceSource source;
};

// Scalar families. Closed forms for Exponential and Laplace unless
// force_quadrature; otherwise A by quadrature expectation of ψ² and B by
//   ∫_{-∞}^0 (∂F/∂θ)²/F dx + ∫_0^∞ (∂F/∂θ)²/F̄ dx.
AsymptoticVariance avar_scalar(const Family& family, const ParamVector& params,
                               bool force_quadrature = false);

// Any family, scaled by 1/n. Pareto needs α > 2 ("asymptotic variance
// undefined" otherwise).
AsymptoticVariance avar_matrix(const Family& family, const ParamVector& params, double n,
                               bool force_quadrature = false);

// σ_F² at θ for a scalar family: closed form, else quadrature.
double sigma2_f(const Family& family, const ParamVector& params);

struct SandwichEstimate {
  Matrix J;      // (1/n) Σ ψψᵀ
  Matrix I;      // (1/n) Σ ∂ψ/∂θ, the empirical Hessian of g
  Matrix V_hat;  // (1/n) I⁻¹ J I⁻¹
};

// Throws Error "objective locally flat" when I is not positive definite.
SandwichEstimate sandwich(const Family& family, const ParamVector& theta_hat,
                          const Sample& sample);
inline SandwichEstimate sandwich(const Family& family, const FitResult& fit,
                                 const Sample& sample) {
  return sandwich(family, fit.theta_hat, sample);
}

enum class IntervalKind { wald, divergence };
std::string_view interval_kind_name(IntervalKind k);

struct IntervalResult {
  double lower;
  double upper;
  double level;
  IntervalKind kind;
  std::optional<double> cutoff_k;
  std::optional<double> c_theta;
  bool lower_at_boundary = false;  // g never reached the level on that side
  bool upper_at_boundary = false;
};

// θ̂ ∓ z·√(σ²/n), z the (1+level)/2 normal quantile.
IntervalResult wald_ci(double theta_hat, double sigma2, std::size_t n, double level);
IntervalResult wald_ci(const Family& family, const FitResult& fit, const Sample& sample,
                       double level);

// Second derivative of the sample objective at θ (scalar families).
double g_curvature(const Family& family, const ParamVector& theta, const Sample& sample);

// c(θ) = σ_F²(θ)·g″(θ) with g the sample objective.
double c_theta(const Family& family, const ParamVector& theta, const Sample& sample);

// k = exp(-c·χ²_{1-level,1}/(2n)).
double divergence_cutoff(double c, std::size_t n, double level);

// {θ : g(θ) - g(θ̂) < -log k}. Exponential closed form
//   (b ± √(b² - 2m₂))/m₂,  b = -log k + √(2m₂);
// bisection on each side of θ̂ for other scalar families.
IntervalResult divergence_interval(const Family& family, const Sample& sample,
                                   const FitResult& fit, double level);

// 8n/(8n+15)·√(2/m₂).
double exponential_unbiased_mckle(const Sample& sample);

// Q(θ̂, θ) = 2n[g(θ) - g(θ̂)] / (σ_F²(θ̂)·g″(θ̂)).
double pivotal_q(const Family& family, const Sample& sample, const FitResult& fit, double theta);

// The exponential test's region in √m₂: reject when a·s² - b·s + c > 0, i.e.
// s outside the real roots (none when the discriminant is negative: always
// reject).
struct ExponentialRegion {
  double a, b, c;
  std::optional<double> lower_root, upper_root;
  bool reject;
};

struct TestResult {
  double statistic_gddt;
  double c_at_null;
  double critical_value;
  double p_value;
  bool reject;
  double alpha;
  double theta0;
  double theta_hat;
  std::optional<ExponentialRegion> region;
};

// Point null θ = θ₀: GDDT = 2n[g(θ₀) - g(θ̂)], critical value c(θ₀)χ²_{α,1},
// p = P(χ²₁ > GDDT/c(θ₀)).
TestResult gddt_test(const Family& family, const Sample& sample, const FitResult& fit,
                     double theta0, double alpha);
TestResult gddt_test(const Family& family, const Sample& sample, double theta0, double alpha);

ExponentialRegion exponential_critical_region(double lambda0, std::size_t n, double mean_sq,
                                              double alpha);

// Power and sample size. g is the population objective under the
// alternative (E_θ|X| - E_{θ₁}[s(X; θ)]) unless a sample is supplied, in
// which case the sample objective is used and θ̂₀ = θ₀.
struct PowerInputs {
  double g0, g1, c0, c1;
};
PowerInputs power_inputs(const Family& family, double theta0, double theta1,
                         const Sample* sample = nullptr);

// P(χ²₁ > (2n[g(θ₁) - g(θ̂₀)] + c(θ̂₀)χ²_{α,1}) / c(θ₁)).
double power_approx(const PowerInputs& in, double alpha, double n);
double power_approx(const Family& family, double theta0, double theta1, double alpha, double n,
                    const Sample* sample = nullptr);

struct SampleSizeResult {
  std::size_t n_star;
  double n0;
  PowerInputs inputs;
  std::optional<std::string> warning;
};

// n₀ = (c(θ₁)χ²_{β,1} - c(θ̂₀)χ²_{α,1}) / (2[g(θ₁) - g(θ̂₀)]), n* = ⌊n₀⌋ + 1,
// with χ²_{q,1} the upper-q quantile and β the target power.
SampleSizeResult required_sample_size(const PowerInputs& in, double alpha, double beta);
SampleSizeResult required_sample_size(const Family& family, double theta0, double theta1,
                                      double alpha, double beta,
                                      const Sample* sample = nullptr);

// Lower-tail χ²₁ quantile, (Φ⁻¹((1+q)/2))².
double chi2_quantile_df1(double q);
// Upper-tail critical value χ²_{α,1}.
double chi2_upper_df1(double alpha);

struct CutoffReport {
  std::vector<double> levels;
  std::vector<double> cutoffs;  // same order as levels
  std::size_t failures;
  std::size_t reps;
};

// Simulates reps samples at `params`, fits each, and returns empirical
// (inverted-CDF) quantiles of g(θ_true) - g(θ̂) at the requested levels.
CutoffReport divergence_region_cutoffs(const Family& family, const ParamVector& params,
                                       std::size_t n, std::size_t reps,
                                       const std::vector<double>& levels, std::uint64_t seed,
                                       unsigned threads = 0);

// Type-1 empirical quantile of sorted data: x_(⌈p·m⌉).
double empirical_quantile_sorted(const std::vector<double>& sorted, double p);

}  // namespace mckle

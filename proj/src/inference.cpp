#include "mckle/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mckle/errors.hpp"
#include "mckle/objective.hpp"
#include "mckle/parallel.hpp"
#include "mckle/quadrature.hpp"
#include "mckle/rng.hpp"
#include "mckle/special.hpp"

namespace mckle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_level(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError(std::string(what) + " must lie in (0,1), got " + std::to_string(p));
  }
}

void require_scalar(const Family& family, const char* what) {
  if (family.dim() != 1) {
    throw DomainError(std::string(what) + " needs a one-parameter family, got " +
                      std::string(family.name()));
  }
}

// Breakpoints covering the bulk of F_θ, with 0 inserted when inside.
std::vector<double> support_cuts(const Family& family, const ParamVector& p) {
  std::vector<double> cuts;
  const double lo = family.support_lower(p);
  cuts.push_back(std::isfinite(lo) ? lo : family.quantile(p, 1e-16));
  for (double q : {1e-10, 1e-4, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1.0 - 1e-4, 1.0 - 1e-10,
                   1.0 - 1e-16}) {
    cuts.push_back(family.quantile(p, q));
  }
  if (cuts.front() < 0.0 && cuts.back() > 0.0) cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

quad::SimpsonOptions avar_quad_opts() {
  quad::SimpsonOptions o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-16;
  return o;
}

// A = Cov[ψ], B = ∫ ∂F ∂Fᵀ / F over x < 0 plus ∫ ∂F ∂Fᵀ / F̄ over x >= 0.
std::pair<Matrix, Matrix> quadrature_ab(const Family& family, const ParamVector& p) {
  const Eigen::Index d = p.size();
  const auto cuts = support_cuts(family, p);
  const auto opts = avar_quad_opts();
  const Vector dmean = family.mean_abs_gradient(p);

  Vector mean_psi(d);
  Matrix second(d, d), B(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    mean_psi[j] = quad::integrate_piecewise(
        [&](double x) {
          const double w = family.pdf(p, x);
          if (w == 0.0) return 0.0;
          return (dmean[j] - family.data_term_gradient(p, x)[j]) * w;
        },
        cuts, opts);
    for (Eigen::Index k = j; k < d; ++k) {
      second(j, k) = second(k, j) = quad::integrate_piecewise(
          [&](double x) {
            const double w = family.pdf(p, x);
            if (w == 0.0) return 0.0;
            const Vector psi = dmean - family.data_term_gradient(p, x);
            return psi[j] * psi[k] * w;
          },
          cuts, opts);
      B(j, k) = B(k, j) = quad::integrate_piecewise(
          [&](double x) {
            const Vector dF = family.cdf_gradient(p, x);
            const double denom = x < 0.0 ? family.cdf(p, x) : family.sf(p, x);
            if (!(denom > 0.0)) return 0.0;
            return dF[j] * dF[k] / denom;
          },
          cuts, opts);
    }
  }
  Matrix A = second - mean_psi * mean_psi.transpose();
  if (!A.allFinite() || !B.allFinite()) throw Error("variance integral diverges");
  return {symmetrize(A), symmetrize(B)};
}

AsymptoticVariance from_ab(Matrix A, Matrix B, double n, VarianceSource src) {
  if (!is_positive_definite(B)) throw Error("variance matrix B is not invertible");
  const Matrix Binv = B.inverse();
  Matrix V = symmetrize(Binv * A * Binv) / n;
  AsymptoticVariance out{std::move(A), std::move(B), V, kNaN, src};
  if (V.rows() == 1) out.sigma2 = V(0, 0) * n;
  return out;
}

ParamVector scalar(double v) {
  ParamVector p(1);
  p << v;
  return p;
}

}  // namespace

std::string_view variance_source_name(VarianceSource s) {
  switch (s) {
    case VarianceSource::closed_form:
      return "closed-form";
    case VarianceSource::quadrature:
      return "quadrature";
    case VarianceSource::sandwich:
      return "sandwich";
  }
  return "quadrature";
}

std::string_view interval_kind_name(IntervalKind k) {
  return k == IntervalKind::wald ? "wald" : "divergence";
}

// ---------------------------------------------------------------------------
// Asymptotic variance

AsymptoticVariance avar_matrix(const Family& family, const ParamVector& p, double n,
                               bool force_quadrature) {
  family.validate(p);
  if (!(n > 0.0)) throw DomainError("n must be positive");
  if (family.id() == FamilyId::pareto && !(p[0] > 2.0)) {
    throw DomainError("asymptotic variance undefined: pareto alpha must exceed 2");
  }
  if (!force_quadrature) {
    Matrix A, B;
    switch (family.id()) {
      case FamilyId::exponential: {
        const double l = p[0];
        A = Matrix::Constant(1, 1, 5.0 / std::pow(l, 4));
        B = Matrix::Constant(1, 1, 2.0 / std::pow(l, 3));
        return from_ab(A, B, n, VarianceSource::closed_form);
      }
      case FamilyId::laplace: {
        A = Matrix::Constant(1, 1, 5.0);
        B = Matrix::Constant(1, 1, 2.0 / p[0]);
        return from_ab(A, B, n, VarianceSource::closed_form);
      }
      case FamilyId::twoparamexp: {
        A.resize(2, 2);
        A << 1.0, 2.0, 2.0, 5.0;
        B.resize(2, 2);
        B << 1.0, 1.0, 1.0, 2.0;
        B /= p[1];
        AsymptoticVariance out = from_ab(A, B, n, VarianceSource::closed_form);
        out.V_n = *family.closed_form_avar(p) / n;
        return out;
      }
      case FamilyId::pareto:
        return {std::nullopt, std::nullopt, *family.closed_form_avar(p) / n, kNaN,
                VarianceSource::closed_form};
      case FamilyId::normal:
        break;
    }
  }
  auto [A, B] = quadrature_ab(family, p);
  return from_ab(std::move(A), std::move(B), n, VarianceSource::quadrature);
}

AsymptoticVariance avar_scalar(const Family& family, const ParamVector& p,
                               bool force_quadrature) {
  require_scalar(family, "avar_scalar");
  return avar_matrix(family, p, 1.0, force_quadrature);
}

double sigma2_f(const Family& family, const ParamVector& p) {
  return avar_scalar(family, p).sigma2;
}

// ---------------------------------------------------------------------------
// Sandwich

SandwichEstimate sandwich(const Family& family, const ParamVector& th, const Sample& sample) {
  family.validate(th);
  const Eigen::Index d = th.size();
  const double n = static_cast<double>(sample.n());

  Matrix J = Matrix::Zero(d, d);
  const Vector dmean = family.mean_abs_gradient(th);
  for (double x : sample.obs()) {
    const Vector psi = dmean - family.data_term_gradient(th, x);
    J += psi * psi.transpose();
  }
  J /= n;

  Matrix I(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double h = family.fd_step(th, static_cast<std::size_t>(k), 1e-5);
    ParamVector hi = th, lo = th;
    hi[k] += h;
    lo[k] -= h;
    I.col(k) = (gee_sum(family, hi, sample) - gee_sum(family, lo, sample)) / (2.0 * h * n);
  }
  I = symmetrize(I);
  if (!I.allFinite() || !is_positive_definite(I)) {
    throw Error("objective locally flat: I is not invertible at the estimate");
  }
  const Matrix Iinv = I.inverse();
  return {symmetrize(J), I, symmetrize(Iinv * J * Iinv) / n};
}

// ---------------------------------------------------------------------------
// Intervals

IntervalResult wald_ci(double theta_hat, double sigma2, std::size_t n, double level) {
  require_level(level, "level");
  if (!(sigma2 > 0.0)) throw DomainError("variance must be positive");
  if (n == 0) throw DomainError("n must be positive");
  const double z = special::normal_quantile(0.5 * (1.0 + level));
  const double half = z * std::sqrt(sigma2 / static_cast<double>(n));
  return {theta_hat - half, theta_hat + half, level, IntervalKind::wald, std::nullopt,
          std::nullopt};
}

IntervalResult wald_ci(const Family& family, const FitResult& fit, const Sample& sample,
                       double level) {
  require_scalar(family, "wald interval");
  return wald_ci(fit.theta_hat[0], sigma2_f(family, fit.theta_hat), sample.n(), level);
}

double g_curvature(const Family& family, const ParamVector& theta, const Sample& sample) {
  require_scalar(family, "g curvature");
  return Objective(family, sample).hessian(theta)(0, 0);
}

double c_theta(const Family& family, const ParamVector& theta, const Sample& sample) {
  return sigma2_f(family, theta) * g_curvature(family, theta, sample);
}

double divergence_cutoff(double c, std::size_t n, double level) {
  require_level(level, "level");
  return std::exp(-c * chi2_quantile_df1(level) / (2.0 * static_cast<double>(n)));
}

double exponential_unbiased_mckle(const Sample& sample) {
  const double n = static_cast<double>(sample.n());
  return 8.0 * n / (8.0 * n + 15.0) * std::sqrt(2.0 / sample.mean_sq());
}

IntervalResult divergence_interval(const Family& family, const Sample& sample,
                                   const FitResult& fit, double level) {
  require_scalar(family, "divergence interval");
  require_level(level, "level");
  const ParamVector& th = fit.theta_hat;
  const double c = c_theta(family, th, sample);
  if (!(c > 0.0)) throw Error("objective locally flat: g'' <= 0 at the estimate");
  const double k = divergence_cutoff(c, sample.n(), level);
  const double excess = -std::log(k);

  IntervalResult out{th[0], th[0], level, IntervalKind::divergence, k, c};
  if (family.id() == FamilyId::exponential) {
    const double m2 = sample.mean_sq();
    const double b = excess + std::sqrt(2.0 * m2);
    const double root = std::sqrt(b * b - 2.0 * m2);
    out.lower = (b - root) / m2;
    out.upper = (b + root) / m2;
    return out;
  }

  // Walk outward in the unconstrained coordinate until g exceeds the level,
  // then bisect.
  const Objective obj(family, sample);
  const double target = fit.g_at_opt + excess;
  const auto excess_at = [&](double t) {
    const ParamVector p = family.from_unconstrained(scalar(t));
    if (!family.in_domain(p)) return kInf;
    try {
      return obj.value(p) - target;
    } catch (const DomainError&) {
      return kInf;
    }
  };
  const double t_hat = family.to_unconstrained(th)[0];
  const double scale = std::max(std::abs(t_hat), 1.0);
  for (int side : {-1, 1}) {
    double inside = t_hat, step = 1e-3 * scale;
    bool found = false;
    double outside = t_hat;
    for (int j = 0; j < 80; ++j) {
      outside = t_hat + side * step;
      if (excess_at(outside) >= 0.0) {
        found = true;
        break;
      }
      inside = outside;
      step *= 2.0;
    }
    double endpoint;
    if (found) {
      const double t = bisect_root(excess_at, inside, outside, 1e-13 * scale);
      endpoint = family.from_unconstrained(scalar(t))[0];
    } else {
      endpoint = side < 0 ? family.descriptor().params[0].lower : kInf;
    }
    if (side < 0) {
      out.lower = endpoint;
      out.lower_at_boundary = !found;
    } else {
      out.upper = endpoint;
      out.upper_at_boundary = !found;
    }
  }
  return out;
}

double pivotal_q(const Family& family, const Sample& sample, const FitResult& fit,
                 double theta) {
  require_scalar(family, "pivotal quantity");
  const double c = c_theta(family, fit.theta_hat, sample);
  if (!(c > 0.0)) throw Error("objective locally flat: g'' <= 0 at the estimate");
  const double g = Objective(family, sample).value(scalar(theta));
  return 2.0 * static_cast<double>(sample.n()) * (g - fit.g_at_opt) / c;
}

// ---------------------------------------------------------------------------
// GDDT

ExponentialRegion exponential_critical_region(double lambda0, std::size_t n, double mean_sq,
                                              double alpha) {
  const double nn = static_cast<double>(n);
  ExponentialRegion r{};
  r.a = nn * lambda0 * lambda0;
  r.b = 2.0 * special::kSqrt2 * nn * lambda0;
  r.c = 2.0 * nn - 2.5 * chi2_upper_df1(alpha);
  const double s = std::sqrt(mean_sq);
  const double disc = r.b * r.b - 4.0 * r.a * r.c;
  if (disc < 0.0) {
    r.reject = true;
    return r;
  }
  const double root = std::sqrt(disc);
  r.lower_root = (r.b - root) / (2.0 * r.a);
  r.upper_root = (r.b + root) / (2.0 * r.a);
  r.reject = s < *r.lower_root || s > *r.upper_root;
  return r;
}

TestResult gddt_test(const Family& family, const Sample& sample, const FitResult& fit,
                     double theta0, double alpha) {
  require_scalar(family, "gddt");
  require_level(alpha, "alpha");
  const ParamVector p0 = scalar(theta0);
  family.validate(p0);
  const Objective obj(family, sample);
  const double n = static_cast<double>(sample.n());
  TestResult r{};
  r.alpha = alpha;
  r.theta0 = theta0;
  r.theta_hat = fit.theta_hat[0];
  r.statistic_gddt = std::max(0.0, 2.0 * n * (obj.value(p0) - fit.g_at_opt));
  r.c_at_null = c_theta(family, p0, sample);
  if (!(r.c_at_null > 0.0)) throw Error("objective locally flat: c(theta0) <= 0");
  r.critical_value = r.c_at_null * chi2_upper_df1(alpha);
  r.p_value = special::chi2_df1_sf(r.statistic_gddt / r.c_at_null);
  r.reject = r.statistic_gddt > r.critical_value;
  if (family.id() == FamilyId::exponential) {
    r.region = exponential_critical_region(theta0, sample.n(), sample.mean_sq(), alpha);
  }
  return r;
}

TestResult gddt_test(const Family& family, const Sample& sample, double theta0, double alpha) {
  return gddt_test(family, sample, fit(family, sample), theta0, alpha);
}

// ---------------------------------------------------------------------------
// Power and sample size

PowerInputs power_inputs(const Family& family, double theta0, double theta1,
                         const Sample* sample) {
  require_scalar(family, "power");
  const ParamVector p0 = scalar(theta0), p1 = scalar(theta1);
  family.validate(p0);
  family.validate(p1);
  // Population values come from quadrature; a wider Hessian step keeps its
  // error well below the curvature.
  const Objective obj = sample ? Objective(family, *sample)
                               : Objective::population(family, p1, StepPolicy{1e-5, 1e-3});
  PowerInputs in{};
  in.g0 = obj.value(p0);
  in.g1 = obj.value(p1);
  in.c0 = sigma2_f(family, p0) * obj.hessian(p0)(0, 0);
  in.c1 = sigma2_f(family, p1) * obj.hessian(p1)(0, 0);
  return in;
}

double power_approx(const PowerInputs& in, double alpha, double n) {
  require_level(alpha, "alpha");
  if (!(in.c1 > 0.0) || !(in.c0 > 0.0)) throw Error("objective locally flat: c <= 0");
  const double arg = (2.0 * n * (in.g1 - in.g0) + in.c0 * chi2_upper_df1(alpha)) / in.c1;
  if (arg <= 0.0) return 1.0;
  return special::chi2_df1_sf(arg);
}

double power_approx(const Family& family, double theta0, double theta1, double alpha, double n,
                    const Sample* sample) {
  return power_approx(power_inputs(family, theta0, theta1, sample), alpha, n);
}

SampleSizeResult required_sample_size(const PowerInputs& in, double alpha, double beta) {
  require_level(alpha, "alpha");
  require_level(beta, "beta");
  const double dg = in.g1 - in.g0;
  if (dg == 0.0 || std::abs(dg) <= 1e-14 * (1.0 + std::abs(in.g0))) {
    throw DomainError("indistinguishable alternative: g(theta1) equals g(theta0)");
  }
  const double n0 =
      (in.c1 * chi2_upper_df1(beta) - in.c0 * chi2_upper_df1(alpha)) / (2.0 * dg);
  SampleSizeResult r{1, n0, in, std::nullopt};
  if (!(n0 > 0.0)) {
    r.warning = "n0 <= 0; any sample size reaches the requested power";
    return r;
  }
  r.n_star = static_cast<std::size_t>(std::floor(n0)) + 1;
  return r;
}

SampleSizeResult required_sample_size(const Family& family, double theta0, double theta1,
                                      double alpha, double beta, const Sample* sample) {
  return required_sample_size(power_inputs(family, theta0, theta1, sample), alpha, beta);
}

double chi2_quantile_df1(double q) { return special::chi2_quantile_df1(q); }

double chi2_upper_df1(double alpha) {
  require_level(alpha, "alpha");
  return special::chi2_quantile_df1(1.0 - alpha);
}

// ---------------------------------------------------------------------------
// Divergence-region cutoffs

double empirical_quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw DataError("empty sample");
  require_level(p, "quantile level");
  const double m = static_cast<double>(sorted.size());
  auto idx = static_cast<std::ptrdiff_t>(std::ceil(p * m - 1e-9)) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(sorted.size()) - 1);
  return sorted[static_cast<std::size_t>(idx)];
}

CutoffReport divergence_region_cutoffs(const Family& family, const ParamVector& params,
                                       std::size_t n, std::size_t reps,
                                       const std::vector<double>& levels, std::uint64_t seed,
                                       unsigned threads) {
  family.validate(params);
  if (family.dim() < 2) throw DomainError("divergence-region cutoffs need a vector family");
  if (reps < 100) throw DomainError("divergence-region cutoffs need reps >= 100");
  if (n < 2) throw DomainError("n must be at least 2");
  for (double l : levels) require_level(l, "level");

  const auto values = parallel_map<double>(
      reps, threads == 0 ? default_threads() : threads, [&](std::size_t r) {
        Rng rng(seed, stream_id(n, r));
        try {
          const auto draws = family.sample_from(params, n, rng);
          const Sample s = Sample::build(draws);
          const FitResult f = fit(family, s);
          const double d = Objective(family, s).value(params) - f.g_at_opt;
          return std::isfinite(d) ? d : kNaN;
        } catch (const Error&) {
          return kNaN;
        }
      });
  std::vector<double> ok;
  for (double v : values) {
    if (!std::isnan(v)) ok.push_back(v);
  }
  const std::size_t failures = reps - ok.size();
  if (static_cast<double>(failures) > 0.05 * static_cast<double>(reps)) {
    throw ConvergenceError("divergence-region cutoffs: " + std::to_string(failures) + " of " +
                           std::to_string(reps) + " replicate fits failed");
  }
  std::sort(ok.begin(), ok.end());
  CutoffReport rep{levels, {}, failures, reps};
  for (double l : levels) rep.cutoffs.push_back(empirical_quantile_sorted(ok, l));
  return rep;
}

}  // namespace mckle

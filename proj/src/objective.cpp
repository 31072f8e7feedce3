#include "mckle/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mckle/errors.hpp"
#include "mckle/quadrature.hpp"
#include "mckle/special.hpp"

namespace mckle {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Objective::Objective(const Family& family, const Sample& sample, StepPolicy steps)
    : family_(&family), sample_(&sample), steps_(steps) {}

Objective::Objective(const Family& family, ParamVector truth, StepPolicy steps)
    : family_(&family), truth_(std::move(truth)), steps_(steps) {}

Objective Objective::population(const Family& family, ParamVector truth, StepPolicy steps) {
  family.validate(truth);
  return Objective(family, std::move(truth), steps);
}

double Objective::data_average(const ParamVector& theta) const {
  if (sample_ != nullptr) return family_->mean_data_term(theta, *sample_);

  // E_{θ*}[data_term(X; θ)] over the bulk of the reference distribution,
  // split at quantiles so each adaptive panel sees a smooth integrand.
  const ParamVector& truth = *truth_;
  std::vector<double> cuts;
  const double lower = family_->support_lower(truth);
  if (std::isfinite(lower)) {
    cuts.push_back(lower);
  } else {
    cuts.push_back(family_->quantile(truth, 1e-16));
  }
  for (double p : {1e-8, 1e-3, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0 - 1e-3, 1.0 - 1e-8, 1.0 - 1e-16}) {
    cuts.push_back(family_->quantile(truth, p));
  }
  if (0.0 > cuts.front() && 0.0 < cuts.back()) cuts.push_back(0.0);
  const double lo_theta = family_->support_lower(theta);
  if (lo_theta > cuts.front() && lo_theta < cuts.back()) cuts.push_back(lo_theta);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  bool infinite = false;
  const auto integrand = [&](double x) {
    const double w = family_->pdf(truth, x);
    if (w == 0.0) return 0.0;
    const double t = family_->data_term(theta, x);
    if (!std::isfinite(t)) {
      infinite = true;
      return 0.0;
    }
    return t * w;
  };
  quad::SimpsonOptions opts;
  opts.rel_tol = 1e-11;
  opts.abs_tol = 1e-15;
  const double v = quad::integrate_piecewise(integrand, cuts, opts);
  return infinite ? -kInf : v;
}

double Objective::value(const ParamVector& theta) const {
  family_->validate(theta);
  const double data = data_average(theta);
  if (data == -kInf) return kInf;
  return family_->mean_abs(theta) - data;
}

Vector Objective::gradient(const ParamVector& theta) const {
  Vector g(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double h = family_->fd_step(theta, static_cast<std::size_t>(j), steps_.gradient_rel);
    ParamVector hi = theta, lo = theta;
    hi[j] += h;
    lo[j] -= h;
    g[j] = (value(hi) - value(lo)) / (2.0 * h);
  }
  return g;
}

Matrix Objective::hessian(const ParamVector& theta) const {
  const Eigen::Index d = theta.size();
  Vector h(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    h[j] = family_->fd_step(theta, static_cast<std::size_t>(j), steps_.hessian_rel);
  }
  const double center = value(theta);
  Matrix H(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    ParamVector hi = theta, lo = theta;
    hi[j] += h[j];
    lo[j] -= h[j];
    H(j, j) = (value(hi) - 2.0 * center + value(lo)) / (h[j] * h[j]);
    for (Eigen::Index k = j + 1; k < d; ++k) {
      ParamVector pp = theta, pm = theta, mp = theta, mm = theta;
      pp[j] += h[j], pp[k] += h[k];
      pm[j] += h[j], pm[k] -= h[k];
      mp[j] -= h[j], mp[k] += h[k];
      mm[j] -= h[j], mm[k] -= h[k];
      H(j, k) = H(k, j) =
          (value(pp) - value(pm) - value(mp) + value(mm)) / (4.0 * h[j] * h[k]);
    }
  }
  return symmetrize(H);
}

// ---------------------------------------------------------------------------

double g_objective(const Family& family, const ParamVector& params, const Sample& sample) {
  return Objective(family, sample).value(params);
}

double ckl_divergence(const Family& family, const ParamVector& params, const Sample& sample) {
  const double g = g_objective(family, params, sample);
  if (g == kInf) return kInf;
  return empirical_entropy_constant(sample) + g - sample.mean_abs();
}

Vector psi(const Family& family, const ParamVector& params, double x) {
  family.validate(params);
  return family.mean_abs_gradient(params) - family.data_term_gradient(params, x);
}

Vector gee_sum(const Family& family, const ParamVector& params, const Sample& sample) {
  family.validate(params);
  const Vector dmean = family.mean_abs_gradient(params);
  Vector total = Vector::Zero(params.size());
  for (double x : sample.obs()) total += dmean - family.data_term_gradient(params, x);
  return total;
}

Vector g_gradient(const Family& family, const ParamVector& params, const Sample& sample,
                  StepPolicy steps) {
  return Objective(family, sample, steps).gradient(params);
}

Matrix g_hessian(const Family& family, const ParamVector& params, const Sample& sample,
                 StepPolicy steps) {
  return Objective(family, sample, steps).hessian(params);
}

// ---------------------------------------------------------------------------

NormalEquationResiduals normal_estimating_equations(const Sample& sample, double mu,
                                                    double sigma) {
  using special::inverse_mills;
  using special::log_normal_cdf;
  const auto obs = sample.obs();
  const double n = static_cast<double>(sample.n());
  const double k = static_cast<double>(sample.k());
  const double r = mu / sigma;

  NormalEquationResiduals out{};

  double mu_eq = 2.0 * n * special::normal_cdf(r) - n + k * log_normal_cdf(-r) -
                 (n - k) * log_normal_cdf(r);
  for (double x : obs) {
    if (x < 0.0) {
      mu_eq -= log_normal_cdf((x - mu) / sigma);
    } else {
      mu_eq += log_normal_cdf((mu - x) / sigma);
    }
  }
  out.mu_equation = mu_eq;

  quad::SimpsonOptions opts;
  opts.rel_tol = 1e-10;
  const auto left = [](double z) { return z * inverse_mills(z); };    // zφ/Φ
  const auto right = [](double z) { return z * inverse_mills(-z); };  // zφ/(1-Φ)

  double sigma_eq = 2.0 * n * special::normal_pdf(r);
  for (double x : obs) {
    const double zx = (x - mu) / sigma;
    if (x < 0.0) {
      sigma_eq += quad::adaptive_simpson(left, zx, -r, opts);
    } else {
      sigma_eq -= quad::adaptive_simpson(right, -r, zx, opts);
    }
  }
  out.sigma_equation = sigma_eq;

  // Same quantity with F_n / F̄_n as step weights: between consecutive order
  // statistics the weight is constant, so integrate panel by panel.
  double ecdf_eq = 2.0 * special::normal_pdf(r);
  const std::size_t nn = sample.n();
  for (std::size_t i = 1; i < nn; ++i) {
    const double lo = obs[i - 1], hi = obs[i];
    if (hi <= lo) continue;
    const double p = static_cast<double>(i) / n;
    const double neg_hi = std::min(hi, 0.0);
    if (lo < neg_hi) {
      ecdf_eq += p * quad::adaptive_simpson(left, (lo - mu) / sigma, (neg_hi - mu) / sigma, opts);
    }
    const double pos_lo = std::max(lo, 0.0);
    if (pos_lo < hi) {
      ecdf_eq -=
          (1.0 - p) * quad::adaptive_simpson(right, (pos_lo - mu) / sigma, (hi - mu) / sigma, opts);
    }
  }
  out.sigma_equation_ecdf = ecdf_eq;
  return out;
}

}  // namespace mckle

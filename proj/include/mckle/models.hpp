#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mckle/empirical.hpp"
#include "mckle/linalg.hpp"
#include "mckle/rng.hpp"

namespace mckle {

// Parameter values in the order given by the family's descriptor.
using ParamVector = Vector;

enum class FamilyId { exponential, laplace, twoparamexp, pareto, normal };

enum class SupportKind {
  nonnegative,      // [0, ∞)
  real_line,        // ℝ
  parameter_bound,  // [μ, ∞) or [β, ∞): lower end is a parameter
};

struct ParamSpec {
  std::string name;
  double lower;  // open bound; -inf for location parameters
  double upper;  // open bound
};

struct FamilyDescriptor {
  FamilyId id;
  std::string name;
  std::vector<ParamSpec> params;
  SupportKind support;
  bool has_closed_form_estimator;
  bool has_closed_form_variance;
};

std::string_view family_name(FamilyId id);
// Accepts "exponential", "laplace", "twoparamexp", "pareto", "normal".
FamilyId parse_family_id(std::string_view name);

// A parametric family on the real line. Concrete families are stateless;
// every method is a pure function of its arguments.
//
// Terminology used throughout:
//   h(x) = ∫_0^x log F̄(y) dy   (x >= 0)
//   u(x) = ∫_x^0 log F(y) dy   (x <= 0)
//   s(x) = u(x) for x < 0, h(x) for x >= 0
// and the sample objective is g(θ) = E_θ|X| - mean_i data_term(x_i).
class Family {
 public:
  virtual ~Family() = default;

  virtual const FamilyDescriptor& descriptor() const = 0;
  FamilyId id() const { return descriptor().id; }
  std::string_view name() const { return descriptor().name; }
  std::size_t dim() const { return descriptor().params.size(); }

  // Throws DomainError naming the first offending parameter.
  void validate(const ParamVector& p) const;
  bool in_domain(const ParamVector& p) const noexcept;

  virtual double cdf(const ParamVector& p, double x) const = 0;
  virtual double sf(const ParamVector& p, double x) const = 0;
  virtual double log_cdf(const ParamVector& p, double x) const;
  virtual double log_sf(const ParamVector& p, double x) const;
  virtual double pdf(const ParamVector& p, double x) const = 0;
  // Lower end of the support (-inf for the full line).
  virtual double support_lower(const ParamVector& p) const = 0;

  // E_θ|X|. Throws DomainError when infinite.
  virtual double mean_abs(const ParamVector& p) const = 0;
  virtual Vector mean_abs_gradient(const ParamVector& p) const;

  // h(x) for x >= 0 (contract violation otherwise).
  virtual double h_integral(const ParamVector& p, double x) const = 0;
  // u(x) for x <= 0. Throws SupportError when log F = -∞ on a set of
  // positive measure inside [x, 0].
  double u_integral(const ParamVector& p, double x) const;
  // s(x); propagates SupportError.
  double s_value(const ParamVector& p, double x) const;

  // Per-observation data term of g. Equals s(x) except where a family's
  // closed-form estimator is derived from the in-support formula of h
  // continued below the support point (TwoParamExp, Pareto). Returns -inf
  // instead of throwing when the observation makes g infinite.
  virtual double data_term(const ParamVector& p, double x) const;
  // mean_i data_term(x_i); families override with moment shortcuts.
  virtual double mean_data_term(const ParamVector& p, const Sample& sample) const;
  // ∂ data_term / ∂θ. Central differences unless overridden.
  virtual Vector data_term_gradient(const ParamVector& p, double x) const;

  // ∂F/∂θ at x. Central differences unless overridden.
  virtual Vector cdf_gradient(const ParamVector& p, double x) const;

  // Inverse CDF for 0 < prob < 1; DomainError otherwise.
  virtual double quantile(const ParamVector& p, double prob) const = 0;

  // n i.i.d. draws by inverse transform.
  std::vector<double> sample_from(const ParamVector& p, std::size_t n, Rng& rng) const;

  // Closed-form MCKLE where the family has one.
  virtual std::optional<ParamVector> closed_form_mckle(const Sample& sample) const;

  // Asymptotic covariance of √n(θ̂ - θ) in closed form, where known.
  virtual std::optional<Matrix> closed_form_avar(const ParamVector& p) const;

  // Starting point for numeric minimisation.
  virtual ParamVector initial_point(const Sample& sample) const = 0;

  // Smooth bijection between the parameter domain and ℝ^dim used by the
  // simplex search: log for positive parameters, α = 1 + e^t for the Pareto
  // shape, identity for locations.
  virtual Vector to_unconstrained(const ParamVector& p) const;
  virtual ParamVector from_unconstrained(const Vector& t) const;

  // True when the estimate puts some observation below the model's lower
  // support point.
  bool violates_support(const ParamVector& p, const Sample& sample) const;

  // Relative central-difference step for parameter j.
  double fd_step(const ParamVector& p, std::size_t j, double rel) const;

 protected:
  // u(x) with -inf in place of the SupportError.
  virtual double u_raw(const ParamVector& p, double x) const = 0;
};

std::shared_ptr<const Family> make_family(FamilyId id);
std::shared_ptr<const Family> make_family(std::string_view name);

// Direct adaptive-Simpson evaluation of the normal h and u integrals at
// relative tolerance 1e-10. The Normal family evaluates them through a
// tabulated antiderivative of log Φ instead; these are the reference path.
double normal_h_direct(double mu, double sigma, double x);
double normal_u_direct(double mu, double sigma, double x);

// L(z) = ∫_0^z log Φ(t) dt, tabulated once.
double normal_log_cdf_antiderivative(double z);

}  // namespace mckle

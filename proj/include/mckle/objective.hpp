#pragma once

#include <optional>

#include "mckle/empirical.hpp"
#include "mckle/linalg.hpp"
#include "mckle/models.hpp"

namespace mckle {

// Relative central-difference steps, scaled by max(|θ_j|, 1).
struct StepPolicy {
  double gradient_rel = 1e-5;
  double hessian_rel = 1e-4;
};

// The MCKLE objective g(θ) = E_θ|X| - (data average of the family's data
// term). The data average comes either from an observed sample, or from the
// population at a reference parameter (E_{θ*}[data_term(X; θ)], used by the
// power and sample-size calculators).
//
// Holds references: the family and the sample must outlive the Objective.
class Objective {
 public:
  Objective(const Family& family, const Sample& sample, StepPolicy steps = {});
  static Objective population(const Family& family, ParamVector truth, StepPolicy steps = {});

  const Family& family() const { return *family_; }
  // Null for a population objective.
  const Sample* sample() const { return sample_; }
  const StepPolicy& steps() const { return steps_; }

  // +∞ when an observation lies outside the model support. Throws
  // DomainError when θ is outside the family domain.
  double value(const ParamVector& theta) const;
  double operator()(const ParamVector& theta) const { return value(theta); }

  // Central differences of value().
  Vector gradient(const ParamVector& theta) const;
  // Nested central differences, symmetrised.
  Matrix hessian(const ParamVector& theta) const;

 private:
  Objective(const Family& family, ParamVector truth, StepPolicy steps);
  double data_average(const ParamVector& theta) const;

  const Family* family_;
  const Sample* sample_ = nullptr;
  std::optional<ParamVector> truth_;
  StepPolicy steps_;
};

// g(θ) for a sample; +∞ on support violation.
double g_objective(const Family& family, const ParamVector& params, const Sample& sample);

// CKL(F̄_n || F̄_θ) = C_n + g(θ) - mean|x|. +∞ on support violation.
double ckl_divergence(const Family& family, const ParamVector& params, const Sample& sample);

// ψ(x, θ) = ∂E_θ|X|/∂θ - ∂s(x)/∂θ.
Vector psi(const Family& family, const ParamVector& params, double x);

// Σ_i ψ(x_i, θ) = n ∇g(θ).
Vector gee_sum(const Family& family, const ParamVector& params, const Sample& sample);

Vector g_gradient(const Family& family, const ParamVector& params, const Sample& sample,
                  StepPolicy steps = {});
Matrix g_hessian(const Family& family, const ParamVector& params, const Sample& sample,
                 StepPolicy steps = {});

// Residuals of the normal-model estimating equations in their printed
// integral forms, for comparison with the numeric gradient of g:
//   mu_equation            = n ∂g/∂μ written with log Φ terms
//   sigma_equation         = n ∂g/∂σ with one ∫ zφ/Φ per observation
//   sigma_equation_ecdf    = ∂g/∂σ with F_n and F̄_n inside a single integral
struct NormalEquationResiduals {
  double mu_equation;
  double sigma_equation;
  double sigma_equation_ecdf;
};
NormalEquationResiduals normal_estimating_equations(const Sample& sample, double mu,
                                                    double sigma);

}  // namespace mckle

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mckle/empirical.hpp"
#include "mckle/linalg.hpp"
#include "mckle/models.hpp"

namespace mckle {

enum class FitMethod { automatic, closed, numeric };
// What actually produced θ̂.
enum class FitPath { closed, profile, numeric };

std::string_view fit_path_name(FitPath p);
FitMethod parse_fit_method(std::string_view s);  // "auto" | "closed" | "numeric"

struct FitOptions {
  FitMethod method = FitMethod::automatic;
  int max_iter = 2000;
  double simplex_tol = 1e-10;  // objective spread
  double bisect_tol = 1e-12;   // bracket width
  int restarts = 3;
  // Starting point for the simplex; the family's initial_point when empty.
  std::optional<ParamVector> start;
};

struct FitResult {
  FamilyId family;
  ParamVector theta_hat;
  double g_at_opt = 0.0;
  FitPath method = FitPath::numeric;
  int iterations = 0;
  bool converged = false;
  bool hessian_pd = false;
  bool support_warning = false;
  double gradient_norm = 0.0;
  std::optional<Matrix> covariance;  // filled by the inference layer
  std::vector<std::string> warnings;
};

// Throws DomainError for bad options, SupportError when g is infinite at
// every candidate (e.g. negative data under a nonnegative family), DataError
// for degenerate samples. Non-convergence is reported, not thrown.
FitResult fit(const Family& family, const Sample& sample, const FitOptions& options = {});

struct SimplexResult {
  Vector point;
  double value;
  int iterations;
  bool converged;
};

// Nelder–Mead with coefficients (1, 2, 0.5, 0.5). `f` may return +inf for
// infeasible points. Initial simplex: start plus `step`·max(|x_j|, 1) along
// each axis.
SimplexResult minimize_nelder_mead(const std::function<double(const Vector&)>& f,
                                   const Vector& start, int max_iter = 2000,
                                   double tol = 1e-10, double step = 0.1);

// Bisection on [lo, hi]; requires a sign change. Returns the midpoint once
// the bracket is narrower than tol (or cannot shrink further in double).
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol = 1e-12);

// The Pareto profile equation in α,
//   log(α/(α-1)) - 1/(α-1) + mean(x log x)/x̄ - log x̄,
// evaluated with the data constant D = mean((x/x̄) log(x/x̄)).
double pareto_profile_equation(double alpha, double data_constant);
double pareto_data_constant(const Sample& sample);

// (α̂, β̂) from the profile root, β̂ = x̄(α̂-1)/α̂. Throws DataError "degenerate
// data" for a constant sample, SupportError for negative data.
std::pair<double, double> solve_pareto_profile(const Sample& sample,
                                               std::pair<double, double> alpha_bracket = {
                                                   1.0 + 1e-8, 1e6});

}  // namespace mckle

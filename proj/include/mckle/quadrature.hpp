#pragma once

#include <functional>
#include <span>

namespace mckle::quad {

struct SimpsonOptions {
  double rel_tol = 1e-10;
  // Absolute floor so integrals that are (nearly) zero still terminate.
  double abs_tol = 1e-14;
  int max_depth = 60;
};

// Adaptive Simpson with Richardson correction: a panel is accepted when
// |S(left) + S(right) - S(whole)| <= 15·tol, and the returned panel value is
// S(left) + S(right) + (S(left) + S(right) - S(whole))/15. The tolerance is
// halved at every bisection. Integrand values must be finite on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const SimpsonOptions& opts = {});

// Sum of adaptive_simpson over consecutive breakpoints, which keeps the rule
// from stepping over narrow features on long ranges.
double integrate_piecewise(const std::function<double(double)>& f,
                           std::span<const double> breakpoints,
                           const SimpsonOptions& opts = {});

}  // namespace mckle::quad

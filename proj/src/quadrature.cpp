#include "mckle/quadrature.hpp"

#include <cmath>

namespace mckle::quad {

namespace {

struct Panel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double recurse(const std::function<double(double)>& f, const Panel& p, double tol,
               int depth) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
  const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
  const double delta = left + right - p.whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return recurse(f, {p.a, lm, p.m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1) +
         recurse(f, {p.m, rm, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const SimpsonOptions& opts) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = simpson(a, b, fa, fm, fb);

  // A coarse estimate sets the scale for the relative tolerance; one extra
  // level keeps a lucky zero at three points from ending the search.
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double rough = simpson(a, m, fa, f(lm), fm) + simpson(m, b, fm, f(rm), fb);
  const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(rough));
  return recurse(f, {a, m, b, fa, fm, fb, whole}, tol, opts.max_depth);
}

double integrate_piecewise(const std::function<double(double)>& f,
                           std::span<const double> breakpoints,
                           const SimpsonOptions& opts) {
  double total = 0.0;
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    total += adaptive_simpson(f, breakpoints[i - 1], breakpoints[i], opts);
  }
  return total;
}

}  // namespace mckle::quad

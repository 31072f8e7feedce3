#include "mckle/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mckle/errors.hpp"
#include "mckle/objective.hpp"

namespace mckle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_value(const Objective& obj, const ParamVector& theta) {
  if (!obj.family().in_domain(theta)) return kInf;
  try {
    const double v = obj.value(theta);
    return std::isnan(v) ? kInf : v;
  } catch (const DomainError&) {
    return kInf;
  }
}

// Stationarity and curvature diagnostics at θ̂.
void diagnose(const Objective& obj, FitResult& r) {
  try {
    const Vector grad = obj.gradient(r.theta_hat);
    r.gradient_norm = grad.norm();
    r.converged = std::isfinite(r.gradient_norm) &&
                  r.gradient_norm < 1e-6 * (1.0 + std::abs(r.g_at_opt));
    const Matrix H = obj.hessian(r.theta_hat);
    r.hessian_pd = H.allFinite() && is_positive_definite(H);
  } catch (const DomainError&) {
    r.gradient_norm = kInf;
    r.converged = false;
    r.hessian_pd = false;
  }
}

// A few Newton steps on g in the original coordinates. The simplex stops on
// objective spread, which at 1e-10 leaves gradients around 1e-5.
void newton_polish(const Objective& obj, FitResult& r) {
  for (int it = 0; it < 5; ++it) {
    Vector grad;
    Matrix H;
    try {
      grad = obj.gradient(r.theta_hat);
      if (grad.norm() < 1e-9 * (1.0 + std::abs(r.g_at_opt))) return;
      H = obj.hessian(r.theta_hat);
    } catch (const DomainError&) {
      return;
    }
    if (!H.allFinite() || !is_positive_definite(H)) return;
    const Vector step = H.ldlt().solve(grad);
    bool accepted = false;
    double scale = 1.0;
    for (int half = 0; half < 8 && !accepted; ++half, scale *= 0.5) {
      const ParamVector cand = r.theta_hat - scale * step;
      const double v = safe_value(obj, cand);
      if (v <= r.g_at_opt) {
        r.theta_hat = cand;
        r.g_at_opt = v;
        accepted = true;
      }
    }
    if (!accepted) return;
  }
}

ParamVector feasible_start(const Family& family, const Objective& obj, ParamVector start,
                           const Sample& sample) {
  if (safe_value(obj, start) < kInf) return start;
  // Pull the support point below the smallest observation.
  const double spread = std::max(std::sqrt(sample.variance()), 1e-3);
  if (family.id() == FamilyId::twoparamexp) {
    start[0] = std::min(start[0], sample.min() - 0.1 * spread);
  } else if (family.id() == FamilyId::pareto && sample.min() > 0.0) {
    start[1] = std::min(start[1], 0.9 * sample.min());
  }
  return start;
}

FitResult numeric_fit(const Family& family, const Sample& sample, const FitOptions& opt,
                      const Objective& obj) {
  ParamVector start = opt.start ? *opt.start : family.initial_point(sample);
  family.validate(start);
  start = feasible_start(family, obj, start, sample);
  if (safe_value(obj, start) == kInf) {
    throw SupportError("support violation: g is infinite at the starting point for " +
                       std::string(family.name()));
  }

  const auto f = [&](const Vector& t) { return safe_value(obj, family.from_unconstrained(t)); };
  SimplexResult best = minimize_nelder_mead(f, family.to_unconstrained(start), opt.max_iter,
                                            opt.simplex_tol);
  int total_iter = best.iterations;
  for (int k = 0; k < opt.restarts; ++k) {
    // Restart from the best point with a fresh, smaller simplex.
    SimplexResult again =
        minimize_nelder_mead(f, best.point, opt.max_iter, opt.simplex_tol, 0.05 / (k + 1));
    total_iter += again.iterations;
    if (again.value < best.value) {
      best = again;
    } else {
      best.converged = best.converged || again.converged;
    }
  }

  FitResult r;
  r.family = family.id();
  r.theta_hat = family.from_unconstrained(best.point);
  r.g_at_opt = best.value;
  r.method = FitPath::numeric;
  r.iterations = total_iter;
  if (!std::isfinite(r.g_at_opt)) {
    throw SupportError("support violation: no feasible parameter found");
  }
  newton_polish(obj, r);
  return r;
}

FitResult closed_fit(const Family& family, const ParamVector& theta, FitPath path,
                     const Objective& obj) {
  FitResult r;
  r.family = family.id();
  r.theta_hat = theta;
  r.method = path;
  family.validate(theta);
  r.g_at_opt = obj.value(theta);
  return r;
}

}  // namespace

std::string_view fit_path_name(FitPath p) {
  switch (p) {
    case FitPath::closed:
      return "closed";
    case FitPath::profile:
      return "profile";
    case FitPath::numeric:
      return "numeric";
  }
  return "numeric";
}

FitMethod parse_fit_method(std::string_view s) {
  if (s == "auto") return FitMethod::automatic;
  if (s == "closed") return FitMethod::closed;
  if (s == "numeric") return FitMethod::numeric;
  throw DomainError("unknown fit method '" + std::string(s) + "'");
}

FitResult fit(const Family& family, const Sample& sample, const FitOptions& opt) {
  if (opt.max_iter < 1 || !(opt.simplex_tol > 0.0) || !(opt.bisect_tol > 0.0) ||
      opt.restarts < 0) {
    throw DomainError("invalid fit options");
  }
  const Objective obj(family, sample);
  const FamilyId id = family.id();
  if ((id == FamilyId::exponential || id == FamilyId::pareto) && sample.k() > 0) {
    throw SupportError("support violation: negative data for nonnegative family " +
                       std::string(family.name()));
  }

  FitResult r;
  std::vector<std::string> notes;
  if (opt.method == FitMethod::numeric) {
    r = numeric_fit(family, sample, opt, obj);
  } else if (id == FamilyId::pareto) {
    const auto [a, b] = solve_pareto_profile(sample);
    ParamVector theta(2);
    theta << a, b;
    r = closed_fit(family, theta, FitPath::profile, obj);
  } else if (auto cf = family.closed_form_mckle(sample)) {
    const bool off_branch = id == FamilyId::twoparamexp && ((*cf)[0] < 0.0 || sample.k() > 0);
    if (off_branch && opt.method == FitMethod::automatic) {
      // The closed form minimises the μ >= 0 branch only.
      FitOptions o = opt;
      o.start = cf;
      r = numeric_fit(family, sample, o, obj);
      notes.push_back("closed form outside its branch (mu < 0 or negative data); minimised numerically");
    } else {
      r = closed_fit(family, *cf, FitPath::closed, obj);
      if (off_branch) notes.push_back("closed form outside its branch (mu < 0 or negative data)");
    }
  } else if (opt.method == FitMethod::closed) {
    throw DomainError("no closed-form estimator for " + std::string(family.name()));
  } else {
    r = numeric_fit(family, sample, opt, obj);
  }

  if (!std::isfinite(r.g_at_opt)) {
    throw SupportError("support violation: g is infinite at the estimate");
  }
  diagnose(obj, r);
  r.support_warning = family.violates_support(r.theta_hat, sample);
  if (r.support_warning) notes.push_back("estimate places observations below the support point");
  if (!r.converged) notes.push_back("stationarity check failed");
  if (!r.hessian_pd) notes.push_back("hessian not positive definite");
  r.warnings.insert(r.warnings.end(), notes.begin(), notes.end());
  return r;
}

// ---------------------------------------------------------------------------

SimplexResult minimize_nelder_mead(const std::function<double(const Vector&)>& f,
                                   const Vector& start, int max_iter, double tol,
                                   double step) {
  const Eigen::Index d = start.size();
  std::vector<Vector> pts(static_cast<std::size_t>(d + 1), start);
  std::vector<double> val(static_cast<std::size_t>(d + 1));
  for (Eigen::Index j = 0; j < d; ++j) {
    pts[static_cast<std::size_t>(j + 1)][j] += step * std::max(std::abs(start[j]), 1.0);
  }
  for (std::size_t i = 0; i < pts.size(); ++i) val[i] = f(pts[i]);

  std::vector<std::size_t> order(pts.size());
  const auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    std::vector<Vector> p2;
    std::vector<double> v2;
    for (std::size_t i : order) {
      p2.push_back(pts[i]);
      v2.push_back(val[i]);
    }
    pts.swap(p2);
    val.swap(v2);
  };

  int it = 0;
  bool converged = false;
  sort_simplex();
  while (true) {
    const double spread = val.back() - val.front();
    if (spread <= tol || (val.back() == val.front())) {
      converged = std::isfinite(val.front());
      break;
    }
    if (it >= max_iter) break;
    ++it;

    Vector centroid = Vector::Zero(d);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) centroid += pts[i];
    centroid /= static_cast<double>(d);
    const Vector& worst = pts.back();

    const Vector xr = centroid + (centroid - worst);
    const double fr = f(xr);
    if (fr < val.front()) {
      const Vector xe = centroid + 2.0 * (centroid - worst);
      const double fe = f(xe);
      if (fe < fr) {
        pts.back() = xe, val.back() = fe;
      } else {
        pts.back() = xr, val.back() = fr;
      }
    } else if (fr < val[val.size() - 2]) {
      pts.back() = xr, val.back() = fr;
    } else {
      bool shrink = false;
      if (fr < val.back()) {
        const Vector xc = centroid + 0.5 * (xr - centroid);
        const double fc = f(xc);
        if (fc <= fr) {
          pts.back() = xc, val.back() = fc;
        } else {
          shrink = true;
        }
      } else {
        const Vector xc = centroid + 0.5 * (worst - centroid);
        const double fc = f(xc);
        if (fc < val.back()) {
          pts.back() = xc, val.back() = fc;
        } else {
          shrink = true;
        }
      }
      if (shrink) {
        for (std::size_t i = 1; i < pts.size(); ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          val[i] = f(pts[i]);
        }
      }
    }
    sort_simplex();
  }
  return {pts.front(), val.front(), it, converged};
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(tol > 0.0)) throw DomainError("bisection tolerance must be positive");
  if (lo > hi) std::swap(lo, hi);
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (!(flo * fhi < 0.0)) {
    throw ConvergenceError("no sign change on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]: f = " + std::to_string(flo) + ", " +
                           std::to_string(fhi));
  }
  while (hi - lo >= tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid, flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------

double pareto_data_constant(const Sample& sample) {
  const double m = sample.mean();
  double acc = 0.0;
  for (double x : sample.obs()) {
    const double r = x / m;
    if (r > 0.0) acc += r * std::log(r);
  }
  return acc / static_cast<double>(sample.n());
}

double pareto_profile_equation(double alpha, double data_constant) {
  const double t = 1.0 / (alpha - 1.0);
  return std::log1p(t) - t + data_constant;
}

std::pair<double, double> solve_pareto_profile(const Sample& sample,
                                               std::pair<double, double> bracket) {
  if (sample.k() > 0) throw SupportError("support violation: negative data for pareto");
  if (!(sample.mean() > 0.0)) throw DataError("degenerate data: all observations are zero");
  const double d = pareto_data_constant(sample);
  if (!(d > 0.0) || sample.min() == sample.max()) {
    throw DataError("degenerate data: constant sample has no pareto profile root");
  }
  const auto eq = [d](double a) { return pareto_profile_equation(a, d); };
  auto [lo, hi] = bracket;
  if (!(lo > 1.0) || !(hi > lo)) throw DomainError("pareto alpha bracket must satisfy 1 < lo < hi");
  int expansions = 0;
  while (eq(hi) < 0.0) {
    if (++expansions > 20) {
      throw ConvergenceError("pareto profile: no bracket up to alpha = " + std::to_string(hi) +
                             " (data constant " + std::to_string(d) + ")");
    }
    hi *= 100.0;
  }
  while (eq(lo) > 0.0) {
    lo = 1.0 + 0.5 * (lo - 1.0);
    if (lo - 1.0 < 1e-300) throw ConvergenceError("pareto profile: no bracket near alpha = 1");
  }
  // Bisect in t = 1/(α-1) as well as α: the bracket spans many decades.
  const double t_root = bisect_root([&](double t) { return std::log1p(t) - t + d; },
                                    1.0 / (hi - 1.0), 1.0 / (lo - 1.0), 1e-300);
  const double alpha = 1.0 + 1.0 / t_root;
  const double beta = sample.mean() * (alpha - 1.0) / alpha;
  return {alpha, beta};
}

}  // namespace mckle

#include "mckle/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "mckle/errors.hpp"
#include "mckle/objective.hpp"
#include "mckle/parallel.hpp"
#include "mckle/rng.hpp"
#include "mckle/solver.hpp"

namespace mckle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

unsigned resolve_threads(unsigned t) { return t == 0 ? default_threads() : t; }

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void require_exponential(const Family& family, Estimator e) {
  if (family.id() != FamilyId::exponential) {
    throw DomainError(std::string(estimator_name(e)) + " is defined for the exponential family only");
  }
}

}  // namespace

std::string_view estimator_name(Estimator e) {
  switch (e) {
    case Estimator::mckle:
      return "mckle";
    case Estimator::mckle_unbiased:
      return "mckle_unbiased";
    case Estimator::mle:
      return "mle";
    case Estimator::mle_unbiased:
      return "mle_unbiased";
  }
  return "mckle";
}

Estimator parse_estimator(std::string_view s) {
  for (Estimator e : {Estimator::mckle, Estimator::mckle_unbiased, Estimator::mle,
                      Estimator::mle_unbiased}) {
    if (estimator_name(e) == s) return e;
  }
  throw DomainError("unknown estimator '" + std::string(s) + "'");
}

ParamVector mle_fit(const Family& family, const Sample& s) {
  const double n = static_cast<double>(s.n());
  ParamVector p(static_cast<Eigen::Index>(family.dim()));
  switch (family.id()) {
    case FamilyId::exponential:
      if (s.k() > 0) throw SupportError("support violation: negative data for exponential");
      if (!(s.mean() > 0.0)) throw DataError("degenerate data: zero mean");
      p << 1.0 / s.mean();
      break;
    case FamilyId::laplace:
      if (!(s.mean_abs() > 0.0)) throw DataError("degenerate data: all observations are zero");
      p << s.mean_abs();
      break;
    case FamilyId::normal: {
      const double sd = std::sqrt(s.variance());
      if (!(sd > 0.0)) throw DataError("degenerate data: constant sample");
      p << s.mean(), sd;
      break;
    }
    case FamilyId::twoparamexp: {
      const double scale = s.mean() - s.min();
      if (!(scale > 0.0)) throw DataError("degenerate data: constant sample");
      p << s.min(), scale;
      break;
    }
    case FamilyId::pareto: {
      if (!(s.min() > 0.0)) throw SupportError("support violation: pareto needs positive data");
      double acc = 0.0;
      for (double x : s.obs()) acc += std::log(x / s.min());
      if (!(acc > 0.0)) throw DataError("degenerate data: constant sample");
      p << n / acc, s.min();
      break;
    }
  }
  return p;
}

double mle_unbiased_exponential(const Sample& s) {
  const ParamVector p = mle_fit(*make_family(FamilyId::exponential), s);
  const double n = static_cast<double>(s.n());
  return (n - 1.0) / n * p[0];
}

ParamVector estimate(const Family& family, const Sample& s, Estimator e) {
  switch (e) {
    case Estimator::mckle: {
      const FitResult f = fit(family, s);
      if (!std::isfinite(f.g_at_opt)) throw ConvergenceError("fit failed");
      return f.theta_hat;
    }
    case Estimator::mckle_unbiased: {
      require_exponential(family, e);
      ParamVector p(1);
      p << exponential_unbiased_mckle(s);
      return p;
    }
    case Estimator::mle:
      return mle_fit(family, s);
    case Estimator::mle_unbiased: {
      require_exponential(family, e);
      ParamVector p(1);
      p << mle_unbiased_exponential(s);
      return p;
    }
  }
  return mle_fit(family, s);
}

Sample draw_sample(const Family& family, const ParamVector& params, std::size_t n,
                   std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  Rng rng(seed, stream_id(a, b));
  const auto draws = family.sample_from(params, n, rng);
  return Sample::build(draws);
}

// ---------------------------------------------------------------------------

SimulationReport run_study(const StudyConfig& cfg) {
  if (cfg.replicates < 1) throw DomainError("replicates must be >= 1");
  if (cfg.sizes.empty()) throw DomainError("sizes must be nonempty");
  if (cfg.estimators.empty()) throw DomainError("at least one estimator is required");
  for (auto s : cfg.sizes) {
    if (s < 1) throw DomainError("sample sizes must be positive");
  }
  const auto family = make_family(cfg.family);
  family->validate(cfg.params);
  for (Estimator e : cfg.estimators) {
    if (e == Estimator::mckle_unbiased || e == Estimator::mle_unbiased) {
      require_exponential(*family, e);
    }
  }
  const auto d = static_cast<Eigen::Index>(family->dim());
  const std::size_t ne = cfg.estimators.size();
  const unsigned threads = resolve_threads(cfg.threads);

  SimulationReport report{cfg, {}};
  for (std::size_t size : cfg.sizes) {
    // One row of estimates per replicate: ne blocks of d values, NaN on failure.
    const auto est = parallel_map<std::vector<double>>(
        cfg.replicates, threads, [&](std::size_t r) {
          std::vector<double> out(ne * static_cast<std::size_t>(d), kNaN);
          Sample s = draw_sample(*family, cfg.params, size, cfg.seed, size, r);
          for (std::size_t e = 0; e < ne; ++e) {
            try {
              const ParamVector p = estimate(*family, s, cfg.estimators[e]);
              if (!p.allFinite()) continue;
              for (Eigen::Index j = 0; j < d; ++j) out[e * d + j] = p[j];
            } catch (const Error&) {
            }
          }
          return out;
        });

    for (std::size_t e = 0; e < ne; ++e) {
      for (Eigen::Index j = 0; j < d; ++j) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& row : est) {
          const double v = row[e * d + j];
          if (std::isnan(v)) continue;
          sum += v;
          ++count;
        }
        const double mean = count ? sum / static_cast<double>(count) : kNaN;
        double ss = 0.0;
        for (const auto& row : est) {
          const double v = row[e * d + j];
          if (!std::isnan(v)) ss += (v - mean) * (v - mean);
        }
        const double var = count > 1 ? ss / static_cast<double>(count - 1) : 0.0;
        const std::size_t fails = cfg.replicates - count;
        report.rows.push_back(
            {size, cfg.estimators[e], family->descriptor().params[static_cast<std::size_t>(j)].name,
             mean, mean / cfg.params[j], var, fails,
             static_cast<double>(fails) > 0.05 * static_cast<double>(cfg.replicates)});
      }
    }
  }
  return report;
}

void write_report_csv(const SimulationReport& report, std::ostream& out) {
  out << "size,estimator,parameter,mean,ratio,variance,failures\n";
  for (const auto& r : report.rows) {
    out << r.size << ',' << estimator_name(r.estimator) << ',' << r.parameter << ','
        << fmt9(r.mean) << ',' << fmt9(r.ratio) << ',' << fmt9(r.variance) << ',' << r.failures
        << '\n';
  }
}

// ---------------------------------------------------------------------------

BiasReport bias_check_exponential(double lambda_true, std::size_t n, std::size_t reps,
                                  std::uint64_t seed, unsigned threads) {
  if (n < 10) throw DomainError("bias check needs n >= 10");
  if (reps < 1) throw DomainError("reps must be >= 1");
  const auto family = make_family(FamilyId::exponential);
  ParamVector p(1);
  p << lambda_true;
  family->validate(p);
  const auto vals = parallel_map<std::pair<double, double>>(
      reps, resolve_threads(threads), [&](std::size_t r) {
        const Sample s = draw_sample(*family, p, n, seed, n, r);
        const double lam = std::sqrt(2.0 / s.mean_sq());
        return std::make_pair(lam, exponential_unbiased_mckle(s));
      });
  double a = 0.0, b = 0.0;
  for (const auto& [x, y] : vals) a += x, b += y;
  a /= static_cast<double>(reps);
  b /= static_cast<double>(reps);
  return {lambda_true, n,           reps,           a, a - lambda_true,
          15.0 * lambda_true / (8.0 * static_cast<double>(n)), b, b - lambda_true};
}

CoverageReport coverage_study(const Family& family, const ParamVector& params, std::size_t n,
                              std::size_t reps, double level, IntervalKind kind,
                              std::uint64_t seed, unsigned threads) {
  if (family.dim() != 1) throw DomainError("coverage study needs a one-parameter family");
  if (reps < 1) throw DomainError("reps must be >= 1");
  family.validate(params);
  // 1 covered, 0 missed, -1 failed.
  const auto hits = parallel_map<int>(reps, resolve_threads(threads), [&](std::size_t r) {
    try {
      const Sample s = draw_sample(family, params, n, seed, n, r);
      const FitResult f = fit(family, s);
      const IntervalResult iv = kind == IntervalKind::wald ? wald_ci(family, f, s, level)
                                                           : divergence_interval(family, s, f, level);
      return (iv.lower <= params[0] && params[0] <= iv.upper) ? 1 : 0;
    } catch (const Error&) {
      return -1;
    }
  });
  std::size_t covered = 0, failures = 0;
  for (int h : hits) {
    if (h < 0) {
      ++failures;
    } else {
      covered += static_cast<std::size_t>(h);
    }
  }
  const double m = static_cast<double>(reps - failures);
  const double cov = m > 0 ? static_cast<double>(covered) / m : kNaN;
  return {cov, m > 0 ? std::sqrt(cov * (1.0 - cov) / m) : kNaN, reps, failures};
}

}  // namespace mckle

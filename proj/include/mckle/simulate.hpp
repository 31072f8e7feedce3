#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mckle/empirical.hpp"
#include "mckle/inference.hpp"
#include "mckle/models.hpp"

namespace mckle {

enum class Estimator { mckle, mckle_unbiased, mle, mle_unbiased };
std::string_view estimator_name(Estimator e);
Estimator parse_estimator(std::string_view s);

struct StudyConfig {
  FamilyId family = FamilyId::exponential;
  ParamVector params;
  std::vector<std::size_t> sizes;
  std::size_t replicates = 10000;
  std::uint64_t seed = 0;
  std::vector<Estimator> estimators{Estimator::mckle, Estimator::mle};
  unsigned threads = 0;  // 0: machine parallelism
};

// One (size, estimator, parameter) cell. mean/ratio/variance are over the
// replicates whose fit succeeded; variance uses denominator (count - 1).
struct StudyRow {
  std::size_t size;
  Estimator estimator;
  std::string parameter;
  double mean;
  double ratio;
  double variance;
  std::size_t failures;
  bool flagged;  // failures > 5% of replicates
};

struct SimulationReport {
  StudyConfig config;
  std::vector<StudyRow> rows;  // size-major, then estimator, then parameter
};

// Replicate r at size index i draws from Rng(seed, stream_id(size, r)); all
// estimators see the same sample.
SimulationReport run_study(const StudyConfig& config);

// Column order: size,estimator,parameter,mean,ratio,variance,failures
void write_report_csv(const SimulationReport& report, std::ostream& out);

// Closed-form MLEs: Exponential 1/x̄; Laplace (scale, location 0) mean|x|;
// Normal (x̄, √(m₂ - x̄²)); TwoParamExp (x_(1), x̄ - x_(1)); Pareto
// (n/Σ log(x/x_(1)), x_(1)). Throws DataError for degenerate data.
ParamVector mle_fit(const Family& family, const Sample& sample);
// (n-1)/(n x̄), exponential only.
double mle_unbiased_exponential(const Sample& sample);

// Estimates for one estimator on one sample (throws on failure).
ParamVector estimate(const Family& family, const Sample& sample, Estimator e);

struct BiasReport {
  double lambda_true;
  std::size_t n;
  std::size_t reps;
  double mean_mckle;
  double bias_mckle;
  double predicted_bias;  // 15λ/(8n)
  double mean_unbiased;
  double bias_unbiased;
};
BiasReport bias_check_exponential(double lambda_true, std::size_t n, std::size_t reps,
                                  std::uint64_t seed, unsigned threads = 0);

struct CoverageReport {
  double coverage;
  double standard_error;
  std::size_t reps;
  std::size_t failures;
};
CoverageReport coverage_study(const Family& family, const ParamVector& params, std::size_t n,
                              std::size_t reps, double level, IntervalKind kind,
                              std::uint64_t seed, unsigned threads = 0);

// Draw a sample for replicate (a, b) of a seeded study.
Sample draw_sample(const Family& family, const ParamVector& params, std::size_t n,
                   std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace mckle

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "mckle/errors.hpp"
#include "mckle/simulate.hpp"

using namespace mckle;

namespace {

ParamVector P(std::initializer_list<double> v) {
  ParamVector p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

std::string csv(const SimulationReport& r) {
  std::ostringstream os;
  write_report_csv(r, os);
  return os.str();
}

}  // namespace

TEST(Mle, Examples) {
  const auto e = make_family("exponential");
  const Sample s = Sample::build(std::vector<double>(10, 0.2));
  EXPECT_NEAR(mle_fit(*e, s)[0], 5.0, 1e-12);
  EXPECT_NEAR(mle_unbiased_exponential(s), 4.5, 1e-12);
  const auto nm = make_family("normal");
  const ParamVector p = mle_fit(*nm, Sample::build(std::vector<double>{0.0, 2.0}));
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  EXPECT_NEAR(p[1], 1.0, 1e-15);
  const auto t = make_family("twoparamexp");
  const ParamVector q = mle_fit(*t, Sample::build(std::vector<double>{1.0, 2.0, 6.0}));
  EXPECT_NEAR(q[0], 1.0, 1e-15);
  EXPECT_NEAR(q[1], 2.0, 1e-15);
  EXPECT_THROW(mle_fit(*nm, Sample::build(std::vector<double>{3.0, 3.0})), DataError);
}

TEST(Estimators, NamesAndScope) {
  for (Estimator e : {Estimator::mckle, Estimator::mckle_unbiased, Estimator::mle,
                      Estimator::mle_unbiased}) {
    EXPECT_EQ(parse_estimator(estimator_name(e)), e);
  }
  EXPECT_THROW(parse_estimator("bayes"), DomainError);
  const auto l = make_family("laplace");
  EXPECT_THROW(estimate(*l, Sample::build(std::vector<double>{1.0, -2.0}), Estimator::mckle_unbiased),
               DomainError);
}

TEST(Study, ShapeAndThreadIndependence) {
  StudyConfig cfg;
  cfg.family = FamilyId::exponential;
  cfg.params = P({5.0});
  for (std::size_t n = 10; n <= 55; n += 5) cfg.sizes.push_back(n);
  cfg.replicates = 200;
  cfg.seed = 42;
  cfg.threads = 1;
  const SimulationReport a = run_study(cfg);
  ASSERT_EQ(a.rows.size(), 20u);
  EXPECT_EQ(a.rows[0].size, 10u);
  EXPECT_EQ(a.rows[0].estimator, Estimator::mckle);
  EXPECT_EQ(a.rows[1].estimator, Estimator::mle);
  for (const auto& r : a.rows) {
    EXPECT_EQ(r.failures, 0u);
    EXPECT_NEAR(r.ratio, r.mean / 5.0, 1e-12);
    EXPECT_GT(r.variance, 0.0);
  }
  cfg.threads = 4;
  EXPECT_EQ(csv(a), csv(run_study(cfg)));
  const std::string text = csv(a);
  EXPECT_EQ(text.rfind("size,estimator,parameter,mean,ratio,variance,failures\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 21);
}

TEST(Study, SingleReplicateAndBadConfig) {
  StudyConfig cfg;
  cfg.family = FamilyId::twoparamexp;
  cfg.params = P({3.0, 2.0});
  cfg.sizes = {20};
  cfg.replicates = 1;
  const SimulationReport r = run_study(cfg);
  ASSERT_EQ(r.rows.size(), 4u);  // 2 estimators × 2 parameters
  for (const auto& row : r.rows) EXPECT_TRUE(std::isnan(row.variance) || row.variance == 0.0);
  cfg.replicates = 0;
  EXPECT_THROW(run_study(cfg), DomainError);
}

TEST(Bias, UnbiasedMckleCloserThanRaw) {
  const BiasReport b = bias_check_exponential(5.0, 20, 4000, 7);
  EXPECT_NEAR(b.predicted_bias, 15.0 * 5.0 / 160.0, 1e-12);
  EXPECT_GT(b.bias_mckle, 0.0);
  EXPECT_LT(std::abs(b.bias_unbiased), std::abs(b.bias_mckle));
}

TEST(Coverage, DivergenceIntervalNearNominal) {
  const auto e = make_family("exponential");
  const CoverageReport c =
      coverage_study(*e, P({2.0}), 100, 2000, 0.95, IntervalKind::divergence, 3);
  EXPECT_EQ(c.failures, 0u);
  EXPECT_NEAR(c.coverage, 0.95, 4.0 * c.standard_error + 0.01);
}

TEST(Draw, Reproducible) {
  const auto e = make_family("exponential");
  const Sample a = draw_sample(*e, P({1.0}), 10, 5, 10, 3);
  const Sample b = draw_sample(*e, P({1.0}), 10, 5, 10, 3);
  const Sample c = draw_sample(*e, P({1.0}), 10, 5, 10, 4);
  EXPECT_TRUE(std::equal(a.obs().begin(), a.obs().end(), b.obs().begin()));
  EXPECT_FALSE(std::equal(a.obs().begin(), a.obs().end(), c.obs().begin()));
}

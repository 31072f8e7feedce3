#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "mckle/errors.hpp"
#include "mckle/objective.hpp"
#include "mckle/rng.hpp"
#include "mckle/solver.hpp"

using namespace mckle;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ParamVector P(std::initializer_list<double> v) {
  ParamVector p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

Sample S(std::vector<double> v) { return Sample::build(v); }

Sample draw(FamilyId id, const ParamVector& p, std::size_t n, std::uint64_t seed) {
  const auto f = make_family(id);
  Rng r(seed);
  return Sample::build(f->sample_from(p, n, r));
}

struct Case {
  FamilyId id;
  ParamVector truth;
};

std::vector<Case> cases() {
  return {{FamilyId::exponential, P({2.0})},
          {FamilyId::laplace, P({1.5})},
          {FamilyId::twoparamexp, P({3.0, 2.0})},
          {FamilyId::twoparamexp, P({-1.0, 1.5})},
          {FamilyId::pareto, P({3.0, 5.0})},
          {FamilyId::normal, P({2.0, 3.0})},
          {FamilyId::normal, P({-0.5, 0.8})}};
}

}  // namespace

TEST(Objective, ClosedFormValues) {
  const auto e = make_family("exponential");
  const Sample s = S({0.2, 1.5, 0.7, 3.1});
  for (double lam : {0.3, 1.0, 4.0}) {
    EXPECT_NEAR(g_objective(*e, P({lam}), s), 1.0 / lam + lam * s.mean_sq() / 2.0, 1e-14);
  }
  const auto l = make_family("laplace");
  EXPECT_NEAR(g_objective(*l, P({1.0}), S({-1.0, 1.0})), 1.0 + std::log(2.0) + 0.5, 1e-14);
  const auto pa = make_family("pareto");
  const Sample sp = S({5.5, 6.0, 9.0, 20.0});
  for (double a : {1.5, 3.0}) {
    for (double b : {4.0, 5.0, 7.0}) {
      const double expect = a * b / (a - 1) + a * *sp.mean_xlogx() -
                            a * sp.mean() * (std::log(b) + 1) + a * b;
      EXPECT_NEAR(g_objective(*pa, P({a, b}), sp), expect, 1e-12 * std::abs(expect));
    }
  }
}

TEST(Objective, SupportViolationIsInfinite) {
  const auto e = make_family("exponential");
  EXPECT_EQ(g_objective(*e, P({1.0}), S({-0.1, 1.0})), kInf);
  EXPECT_EQ(ckl_divergence(*e, P({1.0}), S({-0.1, 1.0})), kInf);
  const auto t = make_family("twoparamexp");
  EXPECT_EQ(g_objective(*t, P({-1.0, 1.0}), S({-2.0, 1.0})), kInf);
  EXPECT_TRUE(std::isfinite(g_objective(*t, P({-3.0, 1.0}), S({-2.0, 1.0}))));
}

TEST(Objective, ExponentialCurvatureAndConvexity) {
  const auto e = make_family("exponential");
  const Sample s = S({0.2, 1.5, 0.7, 3.1});
  for (double lam = 0.05; lam < 50.0; lam *= 1.7) {
    const double h = g_hessian(*e, P({lam}), s)(0, 0);
    EXPECT_NEAR(h, 2.0 / (lam * lam * lam), 1e-4 * 2.0 / (lam * lam * lam)) << lam;
    EXPECT_GT(h, 0.0);
  }
}

TEST(Objective, PsiAndGeeExamples) {
  const auto e = make_family("exponential");
  for (double x : {0.0, 0.4, 2.0}) {
    EXPECT_NEAR(psi(*e, P({1.7}), x)[0], -1.0 / (1.7 * 1.7) + x * x / 2.0, 1e-14);
  }
  EXPECT_NEAR(gee_sum(*e, P({1.0}), S({1.0, 1.0}))[0], -1.0, 1e-15);
  EXPECT_THROW(psi(*e, P({-1.0}), 1.0), DomainError);
}

TEST(Objective, GeeSumIsNTimesGradient) {
  for (const auto& c : cases()) {
    const auto f = make_family(c.id);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Sample s = draw(c.id, c.truth, 40, seed);
      // Evaluate away from the optimum, at a point where g is finite.
      ParamVector th = c.truth;
      th[th.size() - 1] *= 1.1;
      if (c.id == FamilyId::twoparamexp) th[0] = std::min(th[0], s.min()) - 0.1;
      if (c.id == FamilyId::pareto) th[1] = 0.9 * s.min();
      ASSERT_TRUE(std::isfinite(g_objective(*f, th, s)));
      const Vector gee = gee_sum(*f, th, s);
      const Vector grad = g_gradient(*f, th, s) * static_cast<double>(s.n());
      EXPECT_LT((gee - grad).norm(), 1e-6 * (1.0 + grad.norm())) << f->name() << " seed " << seed;
    }
  }
}

TEST(Objective, StationaryAtClosedForm) {
  for (FamilyId id : {FamilyId::exponential, FamilyId::laplace, FamilyId::twoparamexp}) {
    const auto f = make_family(id);
    ParamVector truth = id == FamilyId::twoparamexp ? P({3.0, 2.0}) : P({1.3});
    const Sample s = draw(id, truth, 200, 17);
    const ParamVector th = *f->closed_form_mckle(s);
    EXPECT_LT(gee_sum(*f, th, s).norm(), 1e-8 * static_cast<double>(s.n())) << f->name();
    EXPECT_LT(g_gradient(*f, th, s).norm(), 1e-7) << f->name();
    EXPECT_TRUE(is_positive_definite(g_hessian(*f, th, s))) << f->name();
  }
}

// CKL(F̄_n || F̄_θ) = C_n + g - mean|x| >= 0 for every θ and every sample.
TEST(Objective, DivergenceNonnegativeOnRandomTriples) {
  Rng pick(99);
  int checked = 0;
  const auto all = cases();
  for (int i = 0; i < 300; ++i) {
    const auto& c = all[static_cast<std::size_t>(pick.next_u64() % all.size())];
    const auto f = make_family(c.id);
    const std::size_t n = 1 + pick.next_u64() % 60;
    const Sample s = draw(c.id, c.truth, n, pick.next_u64());
    ParamVector th = c.truth;
    for (Eigen::Index j = 0; j < th.size(); ++j) {
      const double u = pick.uniform();
      if (f->descriptor().params[static_cast<std::size_t>(j)].lower == 0.0) {
        th[j] *= std::exp(2.0 * (u - 0.5));
      } else {
        th[j] += 2.0 * (u - 0.5);
      }
    }
    if (c.id == FamilyId::pareto) th[0] = std::max(th[0], 1.2);
    const double d = ckl_divergence(*f, th, s);
    if (!std::isfinite(d)) continue;
    ++checked;
    EXPECT_GE(d, -1e-12) << f->name() << " n=" << n << " th=" << th.transpose();
  }
  EXPECT_GT(checked, 150);
}

TEST(Objective, DivergenceLargerAwayFromEstimate) {
  const auto e = make_family("exponential");
  const Sample s = draw(FamilyId::exponential, P({2.0}), 100, 4);
  const FitResult fr = fit(*e, s);
  const double at = ckl_divergence(*e, fr.theta_hat, s);
  EXPECT_GE(at, 0.0);
  EXPECT_GT(ckl_divergence(*e, P({fr.theta_hat[0] * 1.3}), s), at);
  EXPECT_GT(ckl_divergence(*e, P({fr.theta_hat[0] * 0.7}), s), at);
  // n = 1: C_1 = 0 and the divergence is E|X| - h(x) - x.
  const Sample one = S({0.8});
  EXPECT_EQ(empirical_entropy_constant(one), 0.0);
  for (double lam : {0.5, 1.0, 3.0}) {
    const double d = ckl_divergence(*e, P({lam}), one);
    EXPECT_NEAR(d, 1.0 / lam + lam * 0.64 / 2.0 - 0.8, 1e-14);
    EXPECT_GE(d, 0.0);
  }
}

// Median divergence at the fit shrinks with n.
TEST(Objective, DivergenceAtFitShrinksWithN) {
  const auto f = make_family("laplace");
  std::vector<double> med;
  for (std::size_t n : {50, 500, 5000}) {
    std::vector<double> d;
    for (std::uint64_t r = 0; r < 21; ++r) {
      const Sample s = draw(FamilyId::laplace, P({1.0}), n, 1000 + r);
      d.push_back(ckl_divergence(*f, fit(*f, s).theta_hat, s));
    }
    std::nth_element(d.begin(), d.begin() + 10, d.end());
    med.push_back(d[10]);
  }
  EXPECT_GT(med[0], med[1]);
  EXPECT_GT(med[1], med[2]);
}

// E_θ[ψ(X, θ)] = 0 at the truth.
TEST(Objective, PsiHasMeanZeroUnderTheModel) {
  for (const auto& c : cases()) {
    if (c.id == FamilyId::pareto) continue;  // ψ² has no finite mean at α = 3
    const auto f = make_family(c.id);
    Rng r(31337);
    const std::size_t n = c.id == FamilyId::normal ? 200000 : 1000000;
    const auto x = f->sample_from(c.truth, n, r);
    const auto d = c.truth.size();
    Vector sum = Vector::Zero(d), sum2 = Vector::Zero(d);
    for (double v : x) {
      const Vector p = psi(*f, c.truth, v);
      sum += p;
      sum2 += p.cwiseProduct(p);
    }
    const double nn = static_cast<double>(n);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double m = sum[j] / nn;
      const double sd = std::sqrt(sum2[j] / nn - m * m);
      EXPECT_LT(std::abs(m), 4.0 * sd / std::sqrt(nn)) << f->name() << " coord " << j;
    }
  }
}

TEST(Objective, PopulationObjectiveExponential) {
  const auto e = make_family("exponential");
  const Objective pop = Objective::population(*e, P({5.0}));
  EXPECT_EQ(pop.sample(), nullptr);
  for (double lam : {2.0, 5.0, 6.0, 11.0}) {
    EXPECT_NEAR(pop.value(P({lam})), 1.0 / lam + lam / 25.0, 1e-10);
  }
}

TEST(Objective, NormalEstimatingEquationsMatchGradient) {
  const auto f = make_family("normal");
  for (std::uint64_t seed : {3u, 8u}) {
    const Sample s = draw(FamilyId::normal, P({2.0, 3.0}), 60, seed);
    for (const ParamVector& th : {P({2.0, 3.0}), P({1.0, 2.0}), P({-0.4, 1.1})}) {
      const Vector grad = g_gradient(*f, th, s);
      const double n = static_cast<double>(s.n());
      const auto r = normal_estimating_equations(s, th[0], th[1]);
      EXPECT_NEAR(r.mu_equation, n * grad[0], 1e-6 * n * (1 + std::abs(grad[0])));
      EXPECT_NEAR(r.sigma_equation, n * grad[1], 1e-6 * n * (1 + std::abs(grad[1])));
      EXPECT_NEAR(r.sigma_equation_ecdf, grad[1], 1e-6 * (1 + std::abs(grad[1])));
    }
    // At the numeric optimum all three residuals vanish.
    const FitResult fr = fit(*f, s);
    const auto r = normal_estimating_equations(s, fr.theta_hat[0], fr.theta_hat[1]);
    EXPECT_LT(std::abs(r.mu_equation), 1e-5 * s.n());
    EXPECT_LT(std::abs(r.sigma_equation), 1e-5 * s.n());
    EXPECT_LT(std::abs(r.sigma_equation_ecdf), 1e-5);
  }
}

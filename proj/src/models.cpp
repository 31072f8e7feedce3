#include "mckle/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mckle/errors.hpp"
#include "mckle/special.hpp"

namespace mckle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2 = 0.69314718055994530942;

void require_nonnegative_x(double x, const char* what) {
  if (!(x >= 0.0)) throw DomainError(std::string(what) + " requires x >= 0");
}

void require_probability(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw DomainError("probability must lie in (0,1), got " + std::to_string(prob));
  }
}

// ---------------------------------------------------------------------------

class Exponential final : public Family {
 public:
  const FamilyDescriptor& descriptor() const override {
    static const FamilyDescriptor d{FamilyId::exponential,
                                    "exponential",
                                    {{"lambda", 0.0, kInf}},
                                    SupportKind::nonnegative,
                                    true,
                                    true};
    return d;
  }

  double cdf(const ParamVector& p, double x) const override {
    return x <= 0.0 ? 0.0 : -std::expm1(-p[0] * x);
  }
  double sf(const ParamVector& p, double x) const override {
    return x <= 0.0 ? 1.0 : std::exp(-p[0] * x);
  }
  double log_sf(const ParamVector& p, double x) const override {
    return x <= 0.0 ? 0.0 : -p[0] * x;
  }
  double pdf(const ParamVector& p, double x) const override {
    return x < 0.0 ? 0.0 : p[0] * std::exp(-p[0] * x);
  }
  double support_lower(const ParamVector&) const override { return 0.0; }

  double mean_abs(const ParamVector& p) const override { return 1.0 / p[0]; }
  Vector mean_abs_gradient(const ParamVector& p) const override {
    return Vector::Constant(1, -1.0 / (p[0] * p[0]));
  }

  double h_integral(const ParamVector& p, double x) const override {
    require_nonnegative_x(x, "h_integral");
    return -0.5 * p[0] * x * x;
  }

  double data_term(const ParamVector& p, double x) const override {
    return x < 0.0 ? -kInf : -0.5 * p[0] * x * x;
  }
  double mean_data_term(const ParamVector& p, const Sample& s) const override {
    return s.k() > 0 ? -kInf : -0.5 * p[0] * s.mean_sq();
  }
  Vector data_term_gradient(const ParamVector&, double x) const override {
    return Vector::Constant(1, -0.5 * x * x);
  }
  Vector cdf_gradient(const ParamVector& p, double x) const override {
    return Vector::Constant(1, x <= 0.0 ? 0.0 : x * std::exp(-p[0] * x));
  }

  double quantile(const ParamVector& p, double prob) const override {
    require_probability(prob);
    return -std::log1p(-prob) / p[0];
  }

  std::optional<ParamVector> closed_form_mckle(const Sample& s) const override {
    if (s.k() > 0) throw DataError("negative data for nonnegative family");
    if (!(s.mean_sq() > 0.0)) throw DataError("degenerate data: all observations are zero");
    return ParamVector::Constant(1, std::sqrt(2.0 / s.mean_sq()));
  }

  std::optional<Matrix> closed_form_avar(const ParamVector& p) const override {
    return Matrix::Constant(1, 1, 1.25 * p[0] * p[0]);
  }

  ParamVector initial_point(const Sample& s) const override {
    return ParamVector::Constant(1, s.mean() > 0.0 ? 1.0 / s.mean() : 1.0);
  }

 protected:
  double u_raw(const ParamVector&, double x) const override { return x < 0.0 ? -kInf : 0.0; }
};

// ---------------------------------------------------------------------------

// Standard Laplace, density exp(-|x|/θ)/(2θ).
class Laplace final : public Family {
 public:
  const FamilyDescriptor& descriptor() const override {
    static const FamilyDescriptor d{FamilyId::laplace,
                                    "laplace",
                                    {{"theta", 0.0, kInf}},
                                    SupportKind::real_line,
                                    true,
                                    true};
    return d;
  }

  double cdf(const ParamVector& p, double x) const override {
    return x < 0.0 ? 0.5 * std::exp(x / p[0]) : 1.0 - 0.5 * std::exp(-x / p[0]);
  }
  double sf(const ParamVector& p, double x) const override {
    return x < 0.0 ? 1.0 - 0.5 * std::exp(x / p[0]) : 0.5 * std::exp(-x / p[0]);
  }
  double log_cdf(const ParamVector& p, double x) const override {
    return x < 0.0 ? x / p[0] - kLog2 : std::log1p(-0.5 * std::exp(-x / p[0]));
  }
  double log_sf(const ParamVector& p, double x) const override {
    return x < 0.0 ? std::log1p(-0.5 * std::exp(x / p[0])) : -x / p[0] - kLog2;
  }
  double pdf(const ParamVector& p, double x) const override {
    return 0.5 / p[0] * std::exp(-std::abs(x) / p[0]);
  }
  double support_lower(const ParamVector&) const override { return -kInf; }

  double mean_abs(const ParamVector& p) const override { return p[0]; }
  Vector mean_abs_gradient(const ParamVector&) const override { return Vector::Ones(1); }

  double h_integral(const ParamVector& p, double x) const override {
    require_nonnegative_x(x, "h_integral");
    return -x * kLog2 - x * x / (2.0 * p[0]);
  }

  double data_term(const ParamVector& p, double x) const override {
    return -std::abs(x) * kLog2 - x * x / (2.0 * p[0]);
  }
  double mean_data_term(const ParamVector& p, const Sample& s) const override {
    return -kLog2 * s.mean_abs() - s.mean_sq() / (2.0 * p[0]);
  }
  Vector data_term_gradient(const ParamVector& p, double x) const override {
    return Vector::Constant(1, x * x / (2.0 * p[0] * p[0]));
  }
  Vector cdf_gradient(const ParamVector& p, double x) const override {
    const double t = p[0];
    const double v = x < 0.0 ? -0.5 * std::exp(x / t) * x / (t * t)
                             : -0.5 * std::exp(-x / t) * x / (t * t);
    return Vector::Constant(1, v);
  }

  double quantile(const ParamVector& p, double prob) const override {
    require_probability(prob);
    return prob < 0.5 ? p[0] * std::log(2.0 * prob) : -p[0] * std::log(2.0 * (1.0 - prob));
  }

  std::optional<ParamVector> closed_form_mckle(const Sample& s) const override {
    if (!(s.mean_sq() > 0.0)) throw DataError("degenerate data: all observations are zero");
    return ParamVector::Constant(1, std::sqrt(0.5 * s.mean_sq()));
  }

  std::optional<Matrix> closed_form_avar(const ParamVector& p) const override {
    return Matrix::Constant(1, 1, 1.25 * p[0] * p[0]);
  }

  ParamVector initial_point(const Sample& s) const override {
    return ParamVector::Constant(1, s.mean_abs() > 0.0 ? s.mean_abs() : 1.0);
  }

 protected:
  double u_raw(const ParamVector& p, double x) const override {
    return x * kLog2 - x * x / (2.0 * p[0]);
  }
};

// ---------------------------------------------------------------------------

// Density exp(-(x-μ)/σ)/σ on [μ, ∞).
class TwoParamExponential final : public Family {
 public:
  const FamilyDescriptor& descriptor() const override {
    static const FamilyDescriptor d{FamilyId::twoparamexp,
                                    "twoparamexp",
                                    {{"mu", -kInf, kInf}, {"sigma", 0.0, kInf}},
                                    SupportKind::parameter_bound,
                                    true,
                                    true};
    return d;
  }

  double cdf(const ParamVector& p, double x) const override {
    return x <= p[0] ? 0.0 : -std::expm1(-(x - p[0]) / p[1]);
  }
  double sf(const ParamVector& p, double x) const override {
    return x <= p[0] ? 1.0 : std::exp(-(x - p[0]) / p[1]);
  }
  double log_sf(const ParamVector& p, double x) const override {
    return x <= p[0] ? 0.0 : -(x - p[0]) / p[1];
  }
  double pdf(const ParamVector& p, double x) const override {
    return x < p[0] ? 0.0 : std::exp(-(x - p[0]) / p[1]) / p[1];
  }
  double support_lower(const ParamVector& p) const override { return p[0]; }

  double mean_abs(const ParamVector& p) const override {
    const double mu = p[0], sigma = p[1];
    if (mu >= 0.0) return mu + sigma;
    // ∫_μ^0 F + ∫_0^∞ F̄ with F̄(0) = e^{μ/σ}.
    return -mu - sigma + 2.0 * sigma * std::exp(mu / sigma);
  }
  Vector mean_abs_gradient(const ParamVector& p) const override {
    const double mu = p[0], sigma = p[1];
    Vector g(2);
    if (mu >= 0.0) {
      g << 1.0, 1.0;
    } else {
      const double e = std::exp(mu / sigma);
      g << -1.0 + 2.0 * e, -1.0 + 2.0 * e - 2.0 * (mu / sigma) * e;
    }
    return g;
  }

  double h_integral(const ParamVector& p, double x) const override {
    require_nonnegative_x(x, "h_integral");
    const double mu = p[0], sigma = p[1];
    const double a = std::max(x - mu, 0.0);
    const double b = std::max(-mu, 0.0);
    return -(a * a - b * b) / (2.0 * sigma);
  }

  double data_term(const ParamVector& p, double x) const override {
    const double mu = p[0], sigma = p[1];
    if (x < 0.0) return u_raw(p, x);
    // For μ >= 0 the in-support form -(x-μ)²/(2σ) continued below μ.
    if (mu >= 0.0) return -(x - mu) * (x - mu) / (2.0 * sigma);
    return -(x * x - 2.0 * mu * x) / (2.0 * sigma);
  }
  Vector data_term_gradient(const ParamVector& p, double x) const override {
    const double mu = p[0], sigma = p[1];
    Vector g(2);
    if (x < 0.0) {
      if (x < mu || mu >= 0.0) return Family::data_term_gradient(p, x);
      // u = σ[Li₂(a) - Li₂(b)], a = e^{μ/σ}, b = e^{-(x-μ)/σ}; Li₂'(z) = -log(1-z)/z.
      const double la = std::log(-std::expm1(mu / sigma));
      const double lb = std::log(-std::expm1(-(x - mu) / sigma));
      const double u = u_raw(p, x);
      g << lb - la, u / sigma + (la * mu + lb * (x - mu)) / sigma;
      return g;
    }
    if (mu >= 0.0) {
      const double d = x - mu;
      g << d / sigma, d * d / (2.0 * sigma * sigma);
    } else {
      g << x / sigma, (x * x - 2.0 * mu * x) / (2.0 * sigma * sigma);
    }
    return g;
  }
  Vector cdf_gradient(const ParamVector& p, double x) const override {
    Vector g = Vector::Zero(2);
    if (x <= p[0]) return g;
    const double t = (x - p[0]) / p[1];
    const double e = std::exp(-t);
    g << -e / p[1], -e * t / p[1];
    return g;
  }

  double quantile(const ParamVector& p, double prob) const override {
    require_probability(prob);
    return p[0] - p[1] * std::log1p(-prob);
  }

  std::optional<ParamVector> closed_form_mckle(const Sample& s) const override {
    const double sd = std::sqrt(s.variance());
    if (!(sd > 0.0)) throw DataError("degenerate data: constant sample");
    ParamVector theta(2);
    theta << s.mean() - sd, sd;
    return theta;
  }

  std::optional<Matrix> closed_form_avar(const ParamVector& p) const override {
    Matrix m(2, 2);
    m << 1.0, -1.0, -1.0, 2.0;
    return p[1] * p[1] * m;
  }

  ParamVector initial_point(const Sample& s) const override {
    const double sd = std::sqrt(s.variance());
    ParamVector theta(2);
    if (sd > 0.0) {
      theta << s.mean() - sd, sd;
    } else {
      theta << s.min() - 1.0, 1.0;
    }
    return theta;
  }

 protected:
  double u_raw(const ParamVector& p, double x) const override {
    const double mu = p[0], sigma = p[1];
    if (x >= 0.0) return 0.0;
    if (x < mu || mu >= 0.0) return -kInf;
    // ∫ log(1 - e^{-t}) dt = Li₂(e^{-t}) with t = (y-μ)/σ.
    return sigma * (special::dilog(std::exp(mu / sigma)) -
                    special::dilog(std::exp(-(x - mu) / sigma)));
  }
};

// ---------------------------------------------------------------------------

// Density αβ^α / x^{α+1} on [β, ∞).
class Pareto final : public Family {
 public:
  const FamilyDescriptor& descriptor() const override {
    static const FamilyDescriptor d{FamilyId::pareto,
                                    "pareto",
                                    {{"alpha", 0.0, kInf}, {"beta", 0.0, kInf}},
                                    SupportKind::parameter_bound,
                                    false,
                                    true};
    return d;
  }

  double cdf(const ParamVector& p, double x) const override {
    return x <= p[1] ? 0.0 : -std::expm1(p[0] * std::log(p[1] / x));
  }
  double sf(const ParamVector& p, double x) const override {
    return x <= p[1] ? 1.0 : std::exp(p[0] * std::log(p[1] / x));
  }
  double log_sf(const ParamVector& p, double x) const override {
    return x <= p[1] ? 0.0 : p[0] * std::log(p[1] / x);
  }
  double pdf(const ParamVector& p, double x) const override {
    return x < p[1] ? 0.0 : p[0] / x * std::exp(p[0] * std::log(p[1] / x));
  }
  double support_lower(const ParamVector& p) const override { return p[1]; }

  double mean_abs(const ParamVector& p) const override {
    if (!(p[0] > 1.0)) throw DomainError("infinite mean: pareto alpha must exceed 1");
    return p[0] * p[1] / (p[0] - 1.0);
  }
  Vector mean_abs_gradient(const ParamVector& p) const override {
    const double a = p[0], b = p[1];
    Vector g(2);
    g << -b / ((a - 1.0) * (a - 1.0)), a / (a - 1.0);
    return g;
  }

  double h_integral(const ParamVector& p, double x) const override {
    require_nonnegative_x(x, "h_integral");
    if (x < p[1]) return 0.0;
    return -p[0] * (x * (std::log(x) - std::log(p[1]) - 1.0) + p[1]);
  }

  // -α[x log(x/β) - x + β] on all of [0, ∞): the in-support h continued
  // below β.
  double data_term(const ParamVector& p, double x) const override {
    if (x < 0.0) return -kInf;
    const double xl = x > 0.0 ? x * std::log(x / p[1]) : 0.0;
    return -p[0] * (xl - x + p[1]);
  }
  double mean_data_term(const ParamVector& p, const Sample& s) const override {
    if (s.k() > 0) return -kInf;
    if (!s.mean_xlogx()) return Family::mean_data_term(p, s);
    return -p[0] * (*s.mean_xlogx() - s.mean() * (std::log(p[1]) + 1.0) + p[1]);
  }
  Vector data_term_gradient(const ParamVector& p, double x) const override {
    const double a = p[0], b = p[1];
    const double xl = x > 0.0 ? x * std::log(x / b) : 0.0;
    Vector g(2);
    g << -(xl - x + b), a * (x / b - 1.0);
    return g;
  }
  Vector cdf_gradient(const ParamVector& p, double x) const override {
    Vector g = Vector::Zero(2);
    if (x <= p[1]) return g;
    const double r = std::log(p[1] / x);
    const double t = std::exp(p[0] * r);
    g << -t * r, -p[0] * t / p[1];
    return g;
  }

  double quantile(const ParamVector& p, double prob) const override {
    require_probability(prob);
    return p[1] * std::exp(-std::log1p(-prob) / p[0]);
  }

  std::optional<Matrix> closed_form_avar(const ParamVector& p) const override {
    const double a = p[0], b = p[1];
    if (!(a > 2.0)) return std::nullopt;
    const double am1 = a - 1.0;
    const double scale = 1.0 / std::pow(a - 2.0, 3);
    Matrix m(2, 2);
    m(0, 0) = 2.0 * a * std::pow(am1, 4);
    m(0, 1) = m(1, 0) = a * b * am1 * am1;
    m(1, 1) = b * b / a * (a * a - 2.0 * a + 2.0);
    return scale * m;
  }

  ParamVector initial_point(const Sample& s) const override {
    const double x1 = s.min() > 0.0 ? s.min() : 1.0;
    double mean_log = 0.0;
    for (double x : s.obs()) mean_log += x > 0.0 ? std::log(x / x1) : 0.0;
    mean_log /= static_cast<double>(s.n());
    ParamVector theta(2);
    theta << 1.0 + 1.0 / (mean_log + 1e-8), x1;
    return theta;
  }

  Vector to_unconstrained(const ParamVector& p) const override {
    Vector t(2);
    t << std::log(p[0] - 1.0), std::log(p[1]);
    return t;
  }
  ParamVector from_unconstrained(const Vector& t) const override {
    ParamVector p(2);
    p << 1.0 + std::exp(t[0]), std::exp(t[1]);
    return p;
  }

 protected:
  double u_raw(const ParamVector&, double x) const override { return x < 0.0 ? -kInf : 0.0; }
};

// ---------------------------------------------------------------------------

class Normal final : public Family {
 public:
  const FamilyDescriptor& descriptor() const override {
    static const FamilyDescriptor d{FamilyId::normal,
                                    "normal",
                                    {{"mu", -kInf, kInf}, {"sigma", 0.0, kInf}},
                                    SupportKind::real_line,
                                    false,
                                    false};
    return d;
  }

  double cdf(const ParamVector& p, double x) const override {
    return special::normal_cdf((x - p[0]) / p[1]);
  }
  double sf(const ParamVector& p, double x) const override {
    return special::normal_sf((x - p[0]) / p[1]);
  }
  double log_cdf(const ParamVector& p, double x) const override {
    return special::log_normal_cdf((x - p[0]) / p[1]);
  }
  double log_sf(const ParamVector& p, double x) const override {
    return special::log_normal_sf((x - p[0]) / p[1]);
  }
  double pdf(const ParamVector& p, double x) const override {
    return special::normal_pdf((x - p[0]) / p[1]) / p[1];
  }
  double support_lower(const ParamVector&) const override { return -kInf; }

  double mean_abs(const ParamVector& p) const override {
    const double r = p[0] / p[1];
    return p[0] * (2.0 * special::normal_cdf(r) - 1.0) + 2.0 * p[1] * special::normal_pdf(r);
  }
  Vector mean_abs_gradient(const ParamVector& p) const override {
    const double r = p[0] / p[1];
    Vector g(2);
    g << 2.0 * special::normal_cdf(r) - 1.0, 2.0 * special::normal_pdf(r);
    return g;
  }

  // With z = (μ - y)/σ, h(x) = σ[L(μ/σ) - L((μ - x)/σ)] for L' = log Φ.
  double h_integral(const ParamVector& p, double x) const override {
    require_nonnegative_x(x, "h_integral");
    const double mu = p[0], sigma = p[1];
    return sigma * (normal_log_cdf_antiderivative(mu / sigma) -
                    normal_log_cdf_antiderivative((mu - x) / sigma));
  }

  double quantile(const ParamVector& p, double prob) const override {
    return p[0] + p[1] * special::normal_quantile(prob);
  }

  ParamVector initial_point(const Sample& s) const override {
    const double sd = std::sqrt(s.variance());
    ParamVector theta(2);
    theta << s.mean(), sd > 0.0 ? sd : 1.0;
    return theta;
  }

 protected:
  double u_raw(const ParamVector& p, double x) const override {
    const double mu = p[0], sigma = p[1];
    return sigma * (normal_log_cdf_antiderivative(-mu / sigma) -
                    normal_log_cdf_antiderivative((x - mu) / sigma));
  }
};

}  // namespace

// ---------------------------------------------------------------------------

std::string_view family_name(FamilyId id) {
  switch (id) {
    case FamilyId::exponential: return "exponential";
    case FamilyId::laplace: return "laplace";
    case FamilyId::twoparamexp: return "twoparamexp";
    case FamilyId::pareto: return "pareto";
    case FamilyId::normal: return "normal";
  }
  return "unknown";
}

FamilyId parse_family_id(std::string_view name) {
  for (auto id : {FamilyId::exponential, FamilyId::laplace, FamilyId::twoparamexp,
                  FamilyId::pareto, FamilyId::normal}) {
    if (family_name(id) == name) return id;
  }
  throw DomainError("unknown model family '" + std::string(name) + "'");
}

std::shared_ptr<const Family> make_family(FamilyId id) {
  switch (id) {
    case FamilyId::exponential: return std::make_shared<Exponential>();
    case FamilyId::laplace: return std::make_shared<Laplace>();
    case FamilyId::twoparamexp: return std::make_shared<TwoParamExponential>();
    case FamilyId::pareto: return std::make_shared<Pareto>();
    case FamilyId::normal: return std::make_shared<Normal>();
  }
  throw DomainError("unknown model family");
}

std::shared_ptr<const Family> make_family(std::string_view name) {
  return make_family(parse_family_id(name));
}

// ---------------------------------------------------------------------------
// Family: shared behaviour

void Family::validate(const ParamVector& p) const {
  const auto& specs = descriptor().params;
  if (static_cast<std::size_t>(p.size()) != specs.size()) {
    throw DomainError(std::string(name()) + " expects " + std::to_string(specs.size()) +
                      " parameter(s), got " + std::to_string(p.size()));
  }
  for (std::size_t j = 0; j < specs.size(); ++j) {
    const double v = p[static_cast<Eigen::Index>(j)];
    if (!std::isfinite(v) || !(v > specs[j].lower) || !(v < specs[j].upper)) {
      throw DomainError("parameter " + specs[j].name + " = " + std::to_string(v) +
                        " is outside the " + std::string(name()) + " domain");
    }
  }
}

bool Family::in_domain(const ParamVector& p) const noexcept {
  const auto& specs = descriptor().params;
  if (static_cast<std::size_t>(p.size()) != specs.size()) return false;
  for (std::size_t j = 0; j < specs.size(); ++j) {
    const double v = p[static_cast<Eigen::Index>(j)];
    if (!std::isfinite(v) || !(v > specs[j].lower) || !(v < specs[j].upper)) return false;
  }
  return true;
}

double Family::log_cdf(const ParamVector& p, double x) const { return std::log(cdf(p, x)); }

double Family::log_sf(const ParamVector& p, double x) const { return std::log(sf(p, x)); }

double Family::fd_step(const ParamVector& p, std::size_t j, double rel) const {
  const auto& spec = descriptor().params[j];
  const double v = p[static_cast<Eigen::Index>(j)];
  double h = rel * std::max(std::abs(v), 1.0);
  while (!(v - h > spec.lower && v + h < spec.upper)) {
    h *= 0.5;
    if (h < 1e-12) throw DomainError("boundary point: parameter " + spec.name);
  }
  return h;
}

Vector Family::mean_abs_gradient(const ParamVector& p) const {
  Vector g(p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double h = fd_step(p, static_cast<std::size_t>(j), 1e-5);
    ParamVector hi = p, lo = p;
    hi[j] += h;
    lo[j] -= h;
    g[j] = (mean_abs(hi) - mean_abs(lo)) / (2.0 * h);
  }
  return g;
}

double Family::u_integral(const ParamVector& p, double x) const {
  if (x > 0.0) throw DomainError("u_integral requires x <= 0");
  const double v = u_raw(p, x);
  if (v == -kInf) {
    throw SupportError("support violation: observation " + std::to_string(x) +
                       " lies below the " + std::string(name()) + " support");
  }
  return v;
}

double Family::s_value(const ParamVector& p, double x) const {
  return x < 0.0 ? u_integral(p, x) : h_integral(p, x);
}

double Family::data_term(const ParamVector& p, double x) const {
  return x < 0.0 ? u_raw(p, x) : h_integral(p, x);
}

double Family::mean_data_term(const ParamVector& p, const Sample& sample) const {
  double acc = 0.0;
  for (double x : sample.obs()) {
    const double t = data_term(p, x);
    if (t == -kInf) return -kInf;
    acc += t;
  }
  return acc / static_cast<double>(sample.n());
}

Vector Family::data_term_gradient(const ParamVector& p, double x) const {
  Vector g(p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double h = fd_step(p, static_cast<std::size_t>(j), 1e-5);
    ParamVector hi = p, lo = p;
    hi[j] += h;
    lo[j] -= h;
    g[j] = (data_term(hi, x) - data_term(lo, x)) / (2.0 * h);
  }
  return g;
}

Vector Family::cdf_gradient(const ParamVector& p, double x) const {
  Vector g(p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double h = fd_step(p, static_cast<std::size_t>(j), 1e-5);
    ParamVector hi = p, lo = p;
    hi[j] += h;
    lo[j] -= h;
    g[j] = (cdf(hi, x) - cdf(lo, x)) / (2.0 * h);
  }
  return g;
}

std::vector<double> Family::sample_from(const ParamVector& p, std::size_t n, Rng& rng) const {
  std::vector<double> out(n);
  for (auto& x : out) x = quantile(p, rng.uniform());
  return out;
}

std::optional<ParamVector> Family::closed_form_mckle(const Sample&) const { return std::nullopt; }

std::optional<Matrix> Family::closed_form_avar(const ParamVector&) const { return std::nullopt; }

Vector Family::to_unconstrained(const ParamVector& p) const {
  const auto& specs = descriptor().params;
  Vector t(p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    t[j] = specs[static_cast<std::size_t>(j)].lower == 0.0 ? std::log(p[j]) : p[j];
  }
  return t;
}

ParamVector Family::from_unconstrained(const Vector& t) const {
  const auto& specs = descriptor().params;
  ParamVector p(t.size());
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    p[j] = specs[static_cast<std::size_t>(j)].lower == 0.0 ? std::exp(t[j]) : t[j];
  }
  return p;
}

bool Family::violates_support(const ParamVector& p, const Sample& sample) const {
  return sample.min() < support_lower(p);
}

}  // namespace mckle

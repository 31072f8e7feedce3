#include <cmath>
#include <vector>

#include "mckle/models.hpp"
#include "mckle/quadrature.hpp"
#include "mckle/special.hpp"

namespace mckle {

namespace {

constexpr double kZMax = 40.0;
constexpr int kPerUnit = 32;
constexpr double kStep = 1.0 / kPerUnit;
constexpr int kNodes = static_cast<int>(2 * kZMax) * kPerUnit + 1;

// Node values of L with exact first and second derivatives (log Φ, φ/Φ);
// quintic Hermite interpolation between nodes.
struct Table {
  std::vector<double> value, d1, d2;

  Table() : value(kNodes), d1(kNodes), d2(kNodes) {
    const int mid = kNodes / 2;
    const auto log_cdf = [](double t) { return special::log_normal_cdf(t); };
    quad::SimpsonOptions opts;
    opts.rel_tol = 1e-14;
    opts.abs_tol = 1e-18;
    value[mid] = 0.0;
    for (int j = mid + 1; j < kNodes; ++j) {
      value[j] = value[j - 1] + quad::adaptive_simpson(log_cdf, z(j - 1), z(j), opts);
    }
    for (int j = mid - 1; j >= 0; --j) {
      value[j] = value[j + 1] - quad::adaptive_simpson(log_cdf, z(j), z(j + 1), opts);
    }
    for (int j = 0; j < kNodes; ++j) {
      d1[j] = special::log_normal_cdf(z(j));
      d2[j] = special::inverse_mills(z(j));
    }
  }

  static double z(int j) { return -kZMax + j * kStep; }

  double eval(double zz) const {
    double pos = (zz + kZMax) * kPerUnit;
    int j = static_cast<int>(std::floor(pos));
    if (j >= kNodes - 1) j = kNodes - 2;
    const double t = pos - j;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    const double h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    const double h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    const double h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    const double h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    const double h5 = 0.5 * t3 - t4 + 0.5 * t5;
    const double hh = kStep * kStep;
    return value[j] * h0 + kStep * d1[j] * h1 + hh * d2[j] * h2 + value[j + 1] * h3 +
           kStep * d1[j + 1] * h4 + hh * d2[j + 1] * h5;
  }
};

const Table& table() {
  static const Table t;
  return t;
}

}  // namespace

double normal_log_cdf_antiderivative(double z) {
  const Table& t = table();
  if (z >= kZMax) {
    // log Φ(t) > -Φ(-40)/(1-Φ(-40)) ≈ -4e-350 beyond the table: nothing left.
    return t.value.back();
  }
  if (z >= -kZMax) return t.eval(z);
  quad::SimpsonOptions opts;
  opts.rel_tol = 1e-12;
  return t.value.front() -
         quad::adaptive_simpson([](double s) { return special::log_normal_cdf(s); }, z, -kZMax,
                                opts);
}

double normal_h_direct(double mu, double sigma, double x) {
  quad::SimpsonOptions opts;
  opts.rel_tol = 1e-10;
  return quad::adaptive_simpson(
      [&](double y) { return special::log_normal_cdf((mu - y) / sigma); }, 0.0, x, opts);
}

double normal_u_direct(double mu, double sigma, double x) {
  quad::SimpsonOptions opts;
  opts.rel_tol = 1e-10;
  return quad::adaptive_simpson(
      [&](double y) { return special::log_normal_cdf((y - mu) / sigma); }, x, 0.0, opts);
}

}  // namespace mckle

#include "latchbench/metrics/stats.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <cmath>

#include "latchbench/core/error.hpp"

namespace latchbench::metrics {

double t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw DomainError("t distribution needs df > 0");
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

TTestResult one_sample_t_test(std::span<const double> differences) {
  const auto n = differences.size();
  if (n < 2) throw DomainError(fmt::format("paired t-test needs n >= 2, got {}", n));
  double mean = 0.0;
  for (double d : differences) mean += d;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double d : differences) ss += (d - mean) * (d - mean);
  TTestResult r;
  r.df = static_cast<double>(n - 1);
  const double sd = std::sqrt(ss / r.df);
  if (sd == 0.0) {
    r.degenerate = true;
    r.t = std::nan("");
    r.p_value = std::nan("");
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p_value = t_two_sided_p(r.t, r.df);
  return r;
}

double mcnemar_exact(std::size_t b, std::size_t c) {
  const auto n = b + c;
  if (n == 0) return 1.0;
  const boost::math::binomial dist(static_cast<double>(n), 0.5);
  return std::min(1.0, 2.0 * boost::math::cdf(dist, static_cast<double>(std::min(b, c))));
}

CurveFit fit_attention_curve(std::span<const CurvePoint> points) {
  CurveFit fit;
  fit.points.assign(points.begin(), points.end());
  std::vector<double> u;
  for (const auto& p : points) {
    if (!(p.x >= 0.0 && p.x <= 1.0)) throw DomainError(fmt::format("curve point x={} outside [0,1]", p.x));
    if (!(p.apa >= 0.0 && p.apa <= 1.0)) throw DomainError(fmt::format("curve point apa={} outside [0,1]", p.apa));
    u.push_back((p.x - 0.5) * (p.x - 0.5));
  }
  const double n = static_cast<double>(points.size());
  double u_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    u_mean += u[i];
    y_mean += points[i].apa;
  }
  if (points.empty()) throw DomainError("curve fit needs at least two distinct x positions");
  u_mean /= n;
  y_mean /= n;
  double suu = 0.0, suy = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    suu += (u[i] - u_mean) * (u[i] - u_mean);
    suy += (u[i] - u_mean) * (points[i].apa - y_mean);
  }
  // x and 1-x share u, so symmetric positions do not add rank.
  if (suu <= 1e-18) throw DomainError("curve fit is rank deficient: all points share the same (x - 0.5)^2");
  fit.alpha_hat = suy / suu;
  fit.gamma_hat = y_mean - fit.alpha_hat * u_mean;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = points[i].apa - (fit.alpha_hat * u[i] + fit.gamma_hat);
    fit.residual_sse += r * r;
  }
  // p(x) on [0,1] spans gamma (x = 0.5) to gamma + alpha/4 (x = 0 or 1).
  const double lo = std::min(fit.gamma_hat, fit.gamma_hat + fit.alpha_hat / 4.0);
  const double hi = std::max(fit.gamma_hat, fit.gamma_hat + fit.alpha_hat / 4.0);
  fit.out_of_range = lo < 0.0 || hi > 1.0;
  return fit;
}

}  // namespace latchbench::metrics

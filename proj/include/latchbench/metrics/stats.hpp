#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace latchbench::metrics {

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  bool degenerate = false;  // zero variance of differences; t and p undefined
};

/// Two-sided one-sample t-test of the mean of `differences` against 0 with
/// n-1 degrees of freedom. Throws DomainError if n < 2.
TTestResult one_sample_t_test(std::span<const double> differences);

/// Two-sided t distribution tail: P(|T| >= |t|) with `df` degrees of freedom.
double t_two_sided_p(double t, double df);

/// Exact McNemar: min(1, 2 * P(X <= min(b,c))) with X ~ Binomial(b+c, 1/2).
/// b = c = 0 gives 1.
double mcnemar_exact(std::size_t b, std::size_t c);

struct CurvePoint {
  double x = 0.0;
  double apa = 0.0;
};

struct CurveFit {
  double alpha_hat = 0.0;
  double gamma_hat = 0.0;
  double residual_sse = 0.0;
  std::vector<CurvePoint> points;
  bool out_of_range = false;  // fitted p(x) leaves [0,1] somewhere on [0,1]
};

/// Least squares of apa = alpha * (x - 0.5)^2 + gamma. Throws DomainError
/// when fewer than two distinct (x - 0.5)^2 values exist, or on apa outside
/// [0,1] or x outside [0,1].
CurveFit fit_attention_curve(std::span<const CurvePoint> points);

}  // namespace latchbench::metrics

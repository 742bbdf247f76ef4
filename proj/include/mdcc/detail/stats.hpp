#pragma once

namespace mdcc::detail {

/// Regularized incomplete beta function I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

/// Quantile of the Beta(a, b) distribution.
double beta_quantile(double a, double b, double q);

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// Clopper-Pearson two-sided interval for k successes in n trials.
Interval clopper_pearson(long k, long n, double confidence = 0.95);

}  // namespace mdcc::detail

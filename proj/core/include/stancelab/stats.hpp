#pragma once

#include <vector>

namespace stancelab {

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 0.0;  // upper-tail probability for the claim mean(a) > mean(b)
};

// One-tailed Welch's t-test (unequal variances, Welch-Satterthwaite df).
// Degenerate input (zero variance in both samples) yields p = 0 when the
// means differ in the claimed direction, p = 1 when they differ against it,
// and p = 0.5 when equal.
WelchResult welch_one_tailed(const std::vector<double>& a,
                             const std::vector<double>& b);

// Cohen's d with the pooled (n-1 weighted) standard deviation.
double cohens_d(const std::vector<double>& a, const std::vector<double>& b);

// Per-comparison significance threshold for m comparisons at alpha = 0.05.
double bonferroni_threshold(int m, double alpha = 0.05);

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double ci95_low = 0.0;   // slope +- t(0.975, n-2) * stderr
  double ci95_high = 0.0;
  double r = 0.0;
  double r_squared = 0.0;
  double p = 0.0;  // two-sided slope p-value
  double rmse = 0.0;
  std::size_t n = 0;
};

// Ordinary least squares with intercept, y on x.
RegressionResult ols_regression(const std::vector<double>& x,
                                const std::vector<double>& y);

double mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);  // n-1 denominator
double sample_stddev(const std::vector<double>& v);
double population_stddev(const std::vector<double>& v);

}  // namespace stancelab

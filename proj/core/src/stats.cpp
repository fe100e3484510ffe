#include "stancelab/stats.hpp"

#include <cmath>
#include <limits>

#include "stancelab/errors.hpp"
#include "stancelab/special.hpp"

namespace stancelab {

double mean(const std::vector<double>& v) {
  if (v.empty()) throw MetricError("mean: empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) throw MetricError("sample_variance: need at least two points");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double sample_stddev(const std::vector<double>& v) { return std::sqrt(sample_variance(v)); }

double population_stddev(const std::vector<double>& v) {
  if (v.empty()) throw MetricError("population_stddev: empty sample");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

WelchResult welch_one_tailed(const std::vector<double>& a,
                             const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) {
    throw MetricError("welch_one_tailed: both samples need at least two points");
  }
  const double ma = mean(a);
  const double mb = mean(b);
  const double va = sample_variance(a);
  const double vb = sample_variance(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());

  WelchResult out;
  if (va == 0.0 && vb == 0.0) {
    // Degenerate: no sampling noise at all, the comparison is deterministic.
    out.t = ma > mb ? std::numeric_limits<double>::infinity()
            : ma < mb ? -std::numeric_limits<double>::infinity()
                      : 0.0;
    out.df = na + nb - 2.0;
    out.p = ma > mb ? 0.0 : ma < mb ? 1.0 : 0.5;
    return out;
  }

  const double sa = va / na;
  const double sb = vb / nb;
  out.t = (ma - mb) / std::sqrt(sa + sb);
  double denom = 0.0;
  if (va > 0.0) denom += sa * sa / (na - 1.0);
  if (vb > 0.0) denom += sb * sb / (nb - 1.0);
  out.df = (sa + sb) * (sa + sb) / denom;
  out.p = 1.0 - student_t_cdf(out.t, out.df);
  return out;
}

double cohens_d(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) {
    throw MetricError("cohens_d: both samples need at least two points");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double pooled =
      ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) /
      (na + nb - 2.0);
  if (pooled == 0.0) throw MetricError("cohens_d: zero pooled variance");
  return (mean(a) - mean(b)) / std::sqrt(pooled);
}

double bonferroni_threshold(int m, double alpha) {
  if (m < 1) throw ConfigError("bonferroni_threshold: m must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("bonferroni_threshold: alpha in (0,1)");
  return alpha / static_cast<double>(m);
}

RegressionResult ols_regression(const std::vector<double>& x,
                                const std::vector<double>& y) {
  if (x.size() != y.size()) throw MetricError("ols_regression: size mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw MetricError("ols_regression: need at least three points");

  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0) throw MetricError("ols_regression: regressor is constant");

  RegressionResult out;
  out.n = n;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;

  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (out.intercept + out.slope * x[i]);
    ssr += e * e;
  }
  const double df = static_cast<double>(n - 2);
  out.stderr_slope = std::sqrt(ssr / df / sxx);
  out.rmse = std::sqrt(ssr / static_cast<double>(n));
  out.r = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
  out.r_squared = out.r * out.r;

  const double tq = student_t_quantile(0.975, df);
  out.ci95_low = out.slope - tq * out.stderr_slope;
  out.ci95_high = out.slope + tq * out.stderr_slope;

  if (out.stderr_slope == 0.0) {
    out.p = out.slope == 0.0 ? 1.0 : 0.0;
  } else {
    const double t = out.slope / out.stderr_slope;
    out.p = 2.0 * (1.0 - student_t_cdf(std::abs(t), df));
  }
  return out;
}

}  // namespace stancelab

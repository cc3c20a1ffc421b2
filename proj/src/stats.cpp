#include "roughflow/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "roughflow/errors.hpp"

namespace roughflow {

double mean(const std::vector<double>& x) {
  if (x.empty()) throw ArgumentError("mean of an empty sample");
  double s = 0;
  for (double v : x) s += v;
  return s / x.size();
}

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) throw ArgumentError("variance needs at least 2 samples");
  const double m = mean(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / (x.size() - 1);
}

MeanSE mean_se(const std::vector<double>& x) {
  return {mean(x), std::sqrt(sample_variance(x) / x.size())};
}

CovarianceEstimate cross_covariance(const std::vector<Vec>& x, const std::vector<Vec>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw ArgumentError("covariance needs at least 2 paired samples");
  const int dx = static_cast<int>(x[0].size()), dy = static_cast<int>(y[0].size());
  Vec mx = Vec::Zero(dx), my = Vec::Zero(dy);
  for (size_t k = 0; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  CovarianceEstimate e{Mat::Zero(dx, dy), Mat::Zero(dx, dy)};
  for (size_t k = 0; k < n; ++k) e.cov += (x[k] - mx) * (y[k] - my).transpose();
  e.cov /= (n - 1);
  // SE from the spread of the centred products
  Mat m2 = Mat::Zero(dx, dy);
  for (size_t k = 0; k < n; ++k) {
    const Mat p = (x[k] - mx) * (y[k] - my).transpose();
    m2 += (p - e.cov).cwiseAbs2();
  }
  e.se = (m2 / (n - 1) / n).cwiseSqrt();
  return e;
}

CovarianceEstimate sample_covariance(const std::vector<Vec>& x) { return cross_covariance(x, x); }

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double s = 0;
  for (int k = 1; k <= 100; ++k) {
    const double t = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 2.0 : -2.0) * t;
    if (t < 1e-17) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

KsResult ks_normal(std::vector<double> x) {
  const MeanSE ms = mean_se(x);
  const double sd = std::sqrt(sample_variance(x));
  const size_t n = x.size();
  KsResult r;
  if (sd == 0.0) return r;
  std::sort(x.begin(), x.end());
  boost::math::normal_distribution<double> N(ms.mean, sd);
  for (size_t i = 0; i < n; ++i) {
    const double F = boost::math::cdf(N, x[i]);
    r.stat = std::max({r.stat, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
  }
  const double sn = std::sqrt(static_cast<double>(n));
  r.p = kolmogorov_q((sn + 0.12 + 0.11 / sn) * r.stat);
  return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ArgumentError("two-sample KS needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  KsResult r;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    r.stat = std::max(r.stat, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  const double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size()), sn = std::sqrt(ne);
  r.p = kolmogorov_q((sn + 0.12 + 0.11 / sn) * r.stat);
  return r;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("linear fit needs at least 2 points");
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) throw ArgumentError("linear fit needs distinct abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

double median(std::vector<double> x) {
  if (x.empty()) throw ArgumentError("median of an empty sample");
  std::sort(x.begin(), x.end());
  const size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

}  // namespace roughflow

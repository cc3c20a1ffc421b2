#pragma once

#include <vector>

#include "roughflow/jet.hpp"

namespace roughflow {

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
};

double mean(const std::vector<double>& x);
// unbiased sample variance
double sample_variance(const std::vector<double>& x);
MeanSE mean_se(const std::vector<double>& x);

// sample covariance of the rows of X (samples x dims), and the SE of each entry
struct CovarianceEstimate {
  Mat cov, se;
};
CovarianceEstimate sample_covariance(const std::vector<Vec>& x);
// cross covariance Cov(x^i, y^j) with entrywise SE
CovarianceEstimate cross_covariance(const std::vector<Vec>& x, const std::vector<Vec>& y);

// P(K > lambda) for the Kolmogorov distribution
double kolmogorov_q(double lambda);
// KS statistic and p-value against N(mean, sd^2) with sample mean and sd plugged in
struct KsResult {
  double stat = 0.0;
  double p = 1.0;
};
KsResult ks_normal(std::vector<double> x);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct LinearFit {
  double slope = 0.0, intercept = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> x);

}  // namespace roughflow

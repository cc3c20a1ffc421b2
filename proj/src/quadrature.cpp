#include "roughflow/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "roughflow/errors.hpp"

namespace roughflow {

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  if (n < 1 || n > 256) throw ArgumentError("gauss-legendre order must be in [1,256]");
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) {
    auto r = std::make_unique<GaussRule>();
    gsl_integration_glfixed_table* tab = gsl_integration_glfixed_table_alloc(n);
    r->x.resize(n);
    r->w.resize(n);
    for (int i = 0; i < n; ++i)
      gsl_integration_glfixed_point(-1.0, 1.0, i, &r->x[i], &r->w[i], tab);
    gsl_integration_glfixed_table_free(tab);
    // gsl orders nodes from the centre outwards; sort ascending
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return r->x[a] < r->x[b]; });
    GaussRule sorted;
    for (int i : idx) {
      sorted.x.push_back(r->x[i]);
      sorted.w.push_back(r->w[i]);
    }
    *r = std::move(sorted);
    slot = std::move(r);
  }
  return *slot;
}

const std::vector<double>& gauss_cumulative(int n) {
  static std::mutex mu;
  static std::map<int, std::vector<double>> cache;
  const GaussRule& r = gauss_legendre(n);
  if (n > 16) throw ArgumentError("cumulative rule limited to 16 nodes");
  std::lock_guard<std::mutex> lock(mu);
  auto& S = cache[n];
  if (S.empty()) {
    // monomial coefficients of the Lagrange basis: V c_j = e_j
    Eigen::MatrixXd V(n, n);
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < n; ++m) V(i, m) = std::pow(r.x[i], m);
    const Eigen::MatrixXd c = V.fullPivLu().inverse();  // column j holds l_j
    S.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0;
        for (int m = 0; m < n; ++m)
          acc += c(m, j) * (std::pow(r.x[i], m + 1) - std::pow(-1.0, m + 1)) / (m + 1);
        S[i * n + j] = acc;
      }
  }
  return S;
}

std::vector<double> split_interval(double s, double t, const std::vector<double>& breaks) {
  std::vector<double> pts{s};
  for (double b : breaks)
    if (b > s && b < t) pts.push_back(b);
  pts.push_back(t);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace roughflow

#pragma once

#include <vector>

namespace roughflow {

struct QuadConfig {
  int order = 4;      // Gauss-Legendre points per panel
  int substeps = 16;  // panels per partition interval
};

// nodes on [-1,1]
struct GaussRule {
  std::vector<double> x, w;
};

const GaussRule& gauss_legendre(int n);

// row-major n x n matrix S with S[i*n+j] = int_{-1}^{x_i} l_j, l_j the Lagrange basis on the
// nodes; gives the running integral at every node from the node values alone
const std::vector<double>& gauss_cumulative(int n);

// maps the rule onto [a,b]: calls f(node, weight)
template <class F>
void gauss_panel(const GaussRule& r, double a, double b, F&& f) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (size_t i = 0; i < r.x.size(); ++i) f(c + h * r.x[i], h * r.w[i]);
}

// sorted unique points of [s,t] cut by the given breaks (endpoints included)
std::vector<double> split_interval(double s, double t, const std::vector<double>& breaks);

}  // namespace roughflow

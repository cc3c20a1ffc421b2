#include <algorithm>
#include <cmath>
#include <limits>

#include "roughflow/errors.hpp"
#include "roughflow/quadrature.hpp"
#include "roughflow/turbulence.hpp"

namespace roughflow {

namespace {

struct Support {
  bool empty = true;
  double lo = 0, hi = 0;
  std::vector<double> breaks;
};

// u-interval where some lattice term of E[F(0) (x) F(delta0 + u v)] is non-zero
Support line_support(const KernelSpec& spec, const Vec& v, const Vec& delta0) {
  Support s;
  const Mat M = spec.M();
  const int d = spec.d;
  const double vv = v.squaredNorm(), R = 2.0 * spec.L;
  for (int c = 0; c < d; ++c)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        if (M(a, c) == 0.0 || M(b, c) == 0.0) continue;
        const Vec D = delta0 + spec.offset(a, c) - spec.offset(b, c);
        const double us = -D.dot(v) / vv;
        const double perp2 = (D + us * v).squaredNorm();
        if (perp2 >= R * R) continue;
        const double r = std::sqrt(R * R - perp2) / std::sqrt(vv);
        s.breaks.insert(s.breaks.end(), {us - r, us, us + r});
        if (s.empty) {
          s.lo = us - r;
          s.hi = us + r;
          s.empty = false;
        } else {
          s.lo = std::min(s.lo, us - r);
          s.hi = std::max(s.hi, us + r);
        }
      }
  return s;
}

int ipow(int d, int k) {
  int r = 1;
  for (int i = 0; i < k; ++i) r *= d;
  return r;
}

}  // namespace

Mat line_integral(const KernelSpec& spec, const Vec& v, const Vec& delta0, int k1, int k2, double u_lo,
                  double u_hi, double (*weight)(double), bool split_at_zero) {
  const int d = spec.d;
  if (v.size() != d || delta0.size() != d) throw ArgumentError("velocity and displacement must have length d");
  if (v.norm() == 0.0) throw ArgumentError("line integrals need a non-zero velocity");
  Mat out = Mat::Zero(d * ipow(d, k1), d * ipow(d, k2));
  const Support sup = line_support(spec, v, delta0);
  if (sup.empty) return out;
  const double lo = std::max(u_lo, sup.lo), hi = std::min(u_hi, sup.hi);
  if (!(lo < hi)) return out;
  std::vector<double> br = sup.breaks;
  if (split_at_zero) br.push_back(0.0);
  const std::vector<double> pts = split_interval(lo, hi, br);
  const GaussRule& rule = gauss_legendre(10);
  const double scale = v.norm() / spec.L;
  for (size_t p = 0; p + 1 < pts.size(); ++p) {
    const double a = pts[p], b = pts[p + 1];
    const int panels = std::max(2, static_cast<int>(std::ceil(4.0 * (b - a) * scale)));
    for (int q = 0; q < panels; ++q) {
      const double pa = a + (b - a) * q / panels, pb = a + (b - a) * (q + 1) / panels;
      gauss_panel(rule, pa, pb, [&](double u, double w) {
        const double ww = weight ? w * weight(u) : w;
        out += ww * covariance_oracle(spec, delta0 + u * v, k1, k2);
      });
    }
  }
  return out;
}

namespace {

// sum_j X[(i,j), j]
Vec contract_10(const Mat& X, int d) {
  Vec r = Vec::Zero(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r(i) += X(i * d + j, j);
  return r;
}

// sum_k X[(i,j,k), k]
Mat contract_20(const Mat& X, int d) {
  Mat r = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) r(i, j) += X((i * d + j) * d + k, k);
  return r;
}

// sum_k X[(i,k), (k,j)]
Mat contract_11(const Mat& X, int d) {
  Mat r = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) r(i, j) += X(i * d + k, k * d + j);
  return r;
}

double one_plus(double u) { return 1.0 + u; }

}  // namespace

Mat HomogenizationOracles::C(const Vec& x, const Vec& y) const {
  return line_integral(spec, v, y - x, 0, 0, -u_max, u_max);
}

HomogenizationOracles compute_oracles(const KernelSpec& spec, const Vec& v, double u_max) {
  spec.validate();
  if (v.size() != spec.d) throw ArgumentError("velocity must have length d");
  if (v.norm() == 0.0) throw ConstraintError("v != 0", "oracles need a non-zero mean velocity");
  const int d = spec.d;
  HomogenizationOracles o;
  o.spec = spec;
  o.v = v;
  o.u_max = u_max > 0 ? u_max : std::numeric_limits<double>::infinity();
  const double U = o.u_max;
  const Vec z = Vec::Zero(d);
  o.C00 = line_integral(spec, v, z, 0, 0, -U, U);
  o.dC = contract_10(line_integral(spec, v, z, 1, 0, -U, U), d);
  // E[. (x) F(-u v)] for u > 0 is the u < 0 half of the line
  const Mat L10n = line_integral(spec, v, z, 1, 0, -U, 0.0);
  const Mat L10p = line_integral(spec, v, z, 1, 0, 0.0, U);
  const Mat L00n = line_integral(spec, v, z, 0, 0, -U, 0.0);
  const Mat L00p = line_integral(spec, v, z, 0, 0, 0.0, U);
  o.b1 = contract_10(L10n, d);
  o.bbar = o.b1;
  o.b_sf = 0.5 * (contract_10(L10n, d) - contract_10(L10p, d));
  o.b2 = L00n;
  o.c_sf = 0.5 * (L00n - L00p);
  o.b3 = contract_20(line_integral(spec, v, z, 2, 0, -U, 0.0), d);
  o.b4 = contract_11(line_integral(spec, v, z, 1, 1, -U, 0.0), d);
  return o;
}

StarTuple ordered_expectation(const KernelSpec& spec, const Vec& v) {
  const int d = spec.d;
  const Vec z = Vec::Zero(d);
  StarTuple e;
  e.s1 = contract_10(line_integral(spec, v, z, 1, 0, -1.0, 0.0, one_plus), d);
  e.s2 = line_integral(spec, v, z, 0, 0, -1.0, 0.0, one_plus);
  e.s3 = contract_20(line_integral(spec, v, z, 2, 0, -1.0, 0.0, one_plus), d);
  e.s4 = contract_11(line_integral(spec, v, z, 1, 1, -1.0, 0.0, one_plus), d);
  return e;
}

}  // namespace roughflow

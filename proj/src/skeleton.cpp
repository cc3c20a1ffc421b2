#include <algorithm>
#include <cmath>

#include "roughflow/errors.hpp"
#include "roughflow/quadrature.hpp"
#include "roughflow/turbulence.hpp"

namespace roughflow {

Graded Graded::zero(int d) { return Graded{Vec::Zero(d), Mat::Zero(d, d), std::vector<Mat>(d, Mat::Zero(d, d))}; }

Graded& Graded::operator+=(const Graded& o) {
  a1 += o.a1;
  a2 += o.a2;
  for (size_t k = 0; k < a3.size(); ++k) a3[k] += o.a3[k];
  return *this;
}

Graded Graded::scaled(double s) const {
  Graded g = *this;
  g.a1 *= s;
  g.a2 *= s;
  for (auto& m : g.a3) m *= s;
  return g;
}

namespace {
double graded_norm(const Graded& g) {
  double s = g.a1.squaredNorm() + g.a2.squaredNorm();
  for (const auto& m : g.a3) s += m.squaredNorm();
  return std::sqrt(s);
}
}  // namespace

StarTuple StarTuple::zero(int d) { return StarTuple{Vec::Zero(d), Mat::Zero(d, d), Mat::Zero(d, d), Mat::Zero(d, d)}; }

StarTuple& StarTuple::operator+=(const StarTuple& o) {
  s1 += o.s1;
  s2 += o.s2;
  s3 += o.s3;
  s4 += o.s4;
  return *this;
}

StarTuple StarTuple::operator-(const StarTuple& o) const {
  return StarTuple{s1 - o.s1, s2 - o.s2, s3 - o.s3, s4 - o.s4};
}

StarTuple StarTuple::scaled(double s) const { return StarTuple{s * s1, s * s2, s * s3, s * s4}; }

double StarTuple::norm() const {
  return std::sqrt(s1.squaredNorm() + s2.squaredNorm() + s3.squaredNorm() + s4.squaredNorm());
}

StarTuple star_product(const Graded& a, const Graded& b) {
  const int d = static_cast<int>(a.a1.size());
  if (b.a1.size() != d || a.a2.rows() != d || a.a2.cols() != d || b.a2.rows() != d || b.a2.cols() != d ||
      static_cast<int>(a.a3.size()) != d || static_cast<int>(b.a3.size()) != d)
    throw ArgumentError("star product operands must share the graded shape for one dimension d");
  StarTuple r;
  r.s1 = a.a2 * b.a1;
  r.s2 = a.a1 * b.a1.transpose();
  r.s3 = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    if (a.a3[k].rows() != d || a.a3[k].cols() != d) throw ArgumentError("third-order slot has the wrong shape");
    r.s3 += b.a1(k) * a.a3[k];
  }
  r.s4 = a.a2 * b.a2;
  return r;
}

Progressive progressive_levels(const FieldRealization& F, const Vec& v, const Vec& x,
                               const std::vector<double>& taus, double panel, int nodes) {
  const int d = F.spec().d;
  if (!(panel > 0)) throw ArgumentError("panel width must be positive");
  for (size_t i = 0; i < taus.size(); ++i)
    if (taus[i] < 0 || (i > 0 && taus[i] < taus[i - 1])) throw ArgumentError("times must be sorted and >= 0");
  Progressive out;
  out.tau = taus;
  if (taus.empty()) return out;
  const double top = taus.back();
  std::vector<double> grid;
  const long np = static_cast<long>(std::ceil(top / panel - 1e-12));
  for (long k = 1; k < np; ++k) grid.push_back(k * panel);
  grid.insert(grid.end(), taus.begin(), taus.end());
  const std::vector<double> pts = split_interval(0.0, top, grid);

  const GaussRule& rule = gauss_legendre(nodes);
  const std::vector<double>& Sm = gauss_cumulative(nodes);
  Graded I = Graded::zero(d);
  StarTuple S = StarTuple::zero(d);
  std::vector<Graded> g(nodes, Graded::zero(d));
  FieldJet fj;
  double z[3];
  size_t next = 0;
  auto record = [&](double t) {
    while (next < taus.size() && taus[next] <= t) {
      out.I.push_back(I);
      out.S.push_back(S);
      ++next;
    }
  };
  record(0.0);
  for (size_t p = 0; p + 1 < pts.size(); ++p) {
    const double a = pts[p], b = pts[p + 1], hw = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < nodes; ++i) {
      const double u = mid + hw * rule.x[i];
      for (int q = 0; q < d; ++q) z[q] = x(q) + u * v(q);
      F.eval(z, 2, fj);
      Graded& gi = g[i];
      for (int q = 0; q < d; ++q) {
        gi.a1(q) = fj.v[q];
        for (int j = 0; j < d; ++j) {
          gi.a2(q, j) = fj.j[q][j];
          for (int k = 0; k < d; ++k) gi.a3[k](q, j) = fj.h[q][j][k];
        }
      }
    }
    for (int i = 0; i < nodes; ++i) {
      Graded Ii = I;
      for (int j = 0; j < nodes; ++j) Ii += g[j].scaled(hw * Sm[i * nodes + j]);
      S += star_product(g[i], Ii).scaled(hw * rule.w[i]);
    }
    for (int i = 0; i < nodes; ++i) I += g[i].scaled(hw * rule.w[i]);
    record(b);
  }
  return out;
}

SkeletonResidual skeleton_residual(const FieldRealization& F, const Vec& v, const Vec& x, double t, int n,
                                   const StarTuple& E_ordered, double panel) {
  if (n < 4) throw ArgumentError("skeleton check needs n >= 4");
  const double nt = n * t;
  const int nb = static_cast<int>(std::llround(nt));
  if (nb < 1 || std::abs(nt - nb) > 1e-9) throw ArgumentError("skeleton check needs n t to be a positive integer");
  std::vector<double> taus;
  for (int k = 0; k <= nb; ++k) taus.push_back(k);
  const Progressive pr = progressive_levels(F, v, x, taus, panel);
  const int d = F.spec().d;
  StarTuple disc = StarTuple::zero(d);
  Graded blocks = Graded::zero(d);
  for (int k = 0; k < nb; ++k) {
    Graded Xk = pr.I[k + 1];
    Xk += pr.I[k].scaled(-1.0);
    disc += star_product(Xk, pr.I[k]);
    blocks += Xk;
  }
  const double inv = 1.0 / n, en = 1.0 / std::sqrt(static_cast<double>(n));
  const StarTuple R = (pr.S[nb].scaled(inv) - disc.scaled(inv)) - E_ordered.scaled(t);
  SkeletonResidual r;
  r.total = R.norm();
  Graded gap = pr.I[nb].scaled(en);
  gap += blocks.scaled(-en);
  r.first = graded_norm(gap);
  return r;
}

int sequence_index(double eps) {
  if (!(eps > 0 && eps <= 1)) throw ArgumentError("epsilon must lie in (0,1]");
  const double q = 1.0 / (eps * eps);
  const double r = std::round(q);
  // exact reciprocal squares must not lose one to rounding
  return static_cast<int>(std::abs(q - r) <= 1e-9 * q ? r : std::floor(q));
}

FamilyGap family_vs_sequence(const FieldRealization& F, const Vec& v, const Vec& x, double t, double eps,
                             double panel) {
  FamilyGap g;
  g.n = sequence_index(eps);
  const double en = 1.0 / std::sqrt(static_cast<double>(g.n));
  const double tau_f = t / (eps * eps), tau_s = g.n * t;
  std::vector<double> taus{std::min(tau_f, tau_s), std::max(tau_f, tau_s)};
  const Progressive pr = progressive_levels(F, v, x, taus, panel);
  const size_t jf = tau_f >= tau_s ? 1 : 0, js = 1 - jf;
  Graded d1 = pr.I[jf].scaled(eps);
  d1 += pr.I[js].scaled(-en);
  g.first = graded_norm(d1);
  g.second = (pr.S[jf].scaled(eps * eps) - pr.S[js].scaled(en * en)).norm();
  return g;
}

}  // namespace roughflow

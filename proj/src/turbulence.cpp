#include "roughflow/turbulence.hpp"

#include <algorithm>
#include <cmath>

#include "roughflow/errors.hpp"
#include "roughflow/quadrature.hpp"
#include "roughflow/stats.hpp"

namespace roughflow {

void TurbulenceConfig::validate() const {
  if (v.size() == 0 || v.norm() == 0.0) throw ConstraintError("v != 0", "non-zero mean velocity required");
  for (double e : eps)
    if (!(e > 0 && e <= 1)) throw ConstraintError("0 < eps <= 1", "epsilon must lie in (0,1]");
  if (M < 2) throw ConstraintError("M >= 2", "at least 2 samples required");
  if (!(R > 0)) throw ConstraintError("R > 0", "localization radius must be positive");
  if (!(T > 0)) throw ConstraintError("T > 0", "horizon must be positive");
}

double Cutoff::psi(double u) const {
  if (u <= 1.0) return 1.0;
  if (u >= 2.0) return 0.0;
  const double s = u - 1.0, s2 = s * s, s4 = s2 * s2;
  return 1.0 - s4 * (35.0 - 84.0 * s + 70.0 * s2 - 20.0 * s2 * s);
}

double Cutoff::dpsi(double u) const {
  if (u <= 1.0 || u >= 2.0) return 0.0;
  const double s = u - 1.0, w = 1.0 - s;
  return -140.0 * s * s * s * w * w * w;
}

double Cutoff::value(const double* x, int d) const {
  double r2 = 0;
  for (int i = 0; i < d; ++i) r2 += x[i] * x[i];
  return psi(std::sqrt(r2) / R);
}

double Cutoff::eval(const double* x, int d, double* grad) const {
  double r2 = 0;
  for (int i = 0; i < d; ++i) r2 += x[i] * x[i];
  const double r = std::sqrt(r2), u = r / R;
  const double dp = dpsi(u);
  for (int i = 0; i < d; ++i) grad[i] = (dp == 0.0) ? 0.0 : dp * x[i] / (r * R);
  return psi(u);
}

FieldBox trajectory_box(const Vec& v, double eps, double T, const std::vector<Vec>& x0, double margin) {
  const int d = static_cast<int>(v.size());
  FieldBox b;
  b.lo.assign(d, 1e300);
  b.hi.assign(d, -1e300);
  const double tau = T / (eps * eps);
  for (const Vec& x : x0)
    for (int i = 0; i < d; ++i) {
      const double e = x(i) + tau * v(i);
      b.lo[i] = std::min({b.lo[i], x(i), e});
      b.hi[i] = std::max({b.hi[i], x(i), e});
    }
  for (int i = 0; i < d; ++i) {
    b.lo[i] -= margin;
    b.hi[i] += margin;
  }
  return b;
}

Path rescaled_trajectory(const FieldRealization& F, const Vec& v, double eps, double T, const Vec& x0,
                         const TrajectoryOptions& opt) {
  const int d = F.spec().d;
  if (v.size() != d || x0.size() != d) throw ArgumentError("velocity and start point must have length d");
  if (!(eps > 0 && eps <= 1)) throw ArgumentError("epsilon must lie in (0,1]");
  const double e2 = eps * eps;
  double h = opt.micro_step > 0 ? opt.micro_step : e2 * opt.h0 * F.spec().L / v.norm();
  const long N = std::max(1L, static_cast<long>(std::ceil(T / h - 1e-9)));
  h = T / N;
  const Cutoff chi{opt.R};
  const bool local = opt.R > 0;
  Path p;
  p.t.push_back(0.0);
  p.x.push_back(x0);
  FieldJet fj;
  double x[3], k[4][3], xs[3], z[3];
  for (int i = 0; i < d; ++i) x[i] = x0(i);
  auto rhs = [&](double t, const double* y, double* out) {
    double r2 = 0;
    for (int i = 0; i < d; ++i) {
      z[i] = y[i] + t / e2 * v(i);
      r2 += y[i] * y[i];
    }
    p.max_norm = std::max(p.max_norm, std::sqrt(r2));
    const double c = local ? chi.value(y, d) : 1.0;
    if (c == 0.0) {
      for (int i = 0; i < d; ++i) out[i] = 0.0;
      return;
    }
    F.eval(z, 0, fj);
    for (int i = 0; i < d; ++i) out[i] = c * fj.v[i] / eps;
  };
  for (long n = 0; n < N; ++n) {
    const double t = n * h;
    rhs(t, x, k[0]);
    for (int i = 0; i < d; ++i) xs[i] = x[i] + 0.5 * h * k[0][i];
    rhs(t + 0.5 * h, xs, k[1]);
    for (int i = 0; i < d; ++i) xs[i] = x[i] + 0.5 * h * k[1][i];
    rhs(t + 0.5 * h, xs, k[2]);
    for (int i = 0; i < d; ++i) xs[i] = x[i] + h * k[2][i];
    rhs(t + h, xs, k[3]);
    for (int i = 0; i < d; ++i) {
      x[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
      if (!std::isfinite(x[i]))
        throw DivergenceError("trajectory became non-finite", t, t + h, std::vector<double>(x, x + d));
    }
    if (n + 1 == N || (opt.record_every > 0 && (n + 1) % opt.record_every == 0)) {
      p.t.push_back((n + 1 == N) ? T : (n + 1) * h);
      Vec xv(d);
      for (int i = 0; i < d; ++i) xv(i) = x[i];
      p.x.push_back(xv);
    }
  }
  double r2 = 0;
  for (int i = 0; i < d; ++i) r2 += x[i] * x[i];
  p.max_norm = std::max(p.max_norm, std::sqrt(r2));
  return p;
}

LocalizedSample localized_driver_sample(const FieldRealization& F, const Vec& v, double eps, double s, double t,
                                        const Vec& x, const LocalizedOptions& opt) {
  const int d = F.spec().d;
  if (!(s <= t)) throw ArgumentError("localized driver needs s <= t");
  LocalizedSample out{Vec::Zero(d), Vec::Zero(d), Mat::Zero(d, d)};
  const Cutoff chi{opt.R};
  double g[3] = {0, 0, 0};
  const double c = chi.eval(x.data(), d, g);
  if (s == t || (c == 0.0)) return out;
  const double e2 = eps * eps;
  const double len = (t - s) * v.norm() / (e2 * F.spec().L);
  const int panels = std::max(1, static_cast<int>(std::ceil(len * opt.panels_per_length)));
  const GaussRule& rule = gauss_legendre(opt.nodes);
  const std::vector<double>& S = gauss_cumulative(opt.nodes);
  const int m = opt.nodes;
  Vec P = Vec::Zero(d);
  Mat Q = Mat::Zero(d, d);
  Vec WF = Vec::Zero(d);
  Mat A = Mat::Zero(d, d);
  std::vector<Vec> f(m, Vec::Zero(d));
  std::vector<Mat> Df(m, Mat::Zero(d, d));
  FieldJet fj;
  double z[3];
  for (int k = 0; k < panels; ++k) {
    const double a = s + (t - s) * k / panels, b = s + (t - s) * (k + 1) / panels;
    const double hw = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < m; ++i) {
      const double r = mid + hw * rule.x[i];
      for (int q = 0; q < d; ++q) z[q] = x(q) + r / e2 * v(q);
      F.eval(z, 1, fj);
      for (int q = 0; q < d; ++q) {
        f[i](q) = fj.v[q] / eps;
        for (int l = 0; l < d; ++l) Df[i](q, l) = fj.j[q][l] / eps;
      }
    }
    for (int i = 0; i < m; ++i) {
      Vec Pi = P;
      Mat Qi = Q;
      for (int j = 0; j < m; ++j) {
        Pi += hw * S[i * m + j] * f[j];
        Qi += hw * S[i * m + j] * Df[j];
      }
      const double w = hw * rule.w[i];
      WF += 0.5 * w * (Df[i] * Pi - Qi * f[i]);
      A += 0.5 * w * (f[i] * Pi.transpose() - Pi * f[i].transpose());
    }
    for (int i = 0; i < m; ++i) {
      P += hw * rule.w[i] * f[i];
      Q += hw * rule.w[i] * Df[i];
    }
  }
  Vec gv(d);
  for (int q = 0; q < d; ++q) gv(q) = g[q];
  out.V = c * P;
  out.DV = c * Q + P * gv.transpose();
  out.W = c * c * WF + c * (A * gv);
  return out;
}

RoughDriver localized_driver(const FieldRealization& F, const Vec& v, double eps, double T,
                             const LocalizedOptions& opt) {
  const int d = F.spec().d;
  RoughDriver drv;
  drv.V.dim = drv.W.dim = d;
  drv.V.horizon = drv.W.horizon = T;
  drv.V.max_order = 1;
  drv.W.max_order = 0;
  const FieldRealization* Fp = &F;
  drv.V.eval = [Fp, v, eps, opt, d](double s, double t, const Vec& x, int order) {
    if (order > 1) throw CapabilityError("localized driver supplies V jets to order 1");
    const LocalizedSample smp = localized_driver_sample(*Fp, v, eps, s, t, x, opt);
    Jet j(d, order);
    j.value = smp.V;
    if (order >= 1) j.jac = smp.DV;
    return j;
  };
  drv.W.eval = [Fp, v, eps, opt, d](double s, double t, const Vec& x, int order) {
    if (order > 0) throw CapabilityError("localized driver supplies W values only");
    Jet j(d, 0);
    j.value = localized_driver_sample(*Fp, v, eps, s, t, x, opt).W;
    return j;
  };
  return drv;
}

OnePointReport empirical_onepoint(const std::vector<Vec>& inc, double T, const HomogenizationOracles& o,
                                  double nsigma) {
  if (inc.size() < 2) throw ArgumentError("one-point report needs at least 2 samples");
  const int d = static_cast<int>(inc[0].size());
  OnePointReport r;
  r.drift = Vec::Zero(d);
  r.drift_se = Vec::Zero(d);
  r.ks_p.assign(d, 1.0);
  for (int i = 0; i < d; ++i) {
    std::vector<double> xi;
    for (const Vec& x : inc) xi.push_back(x(i) / T);
    const MeanSE m = mean_se(xi);
    r.drift(i) = m.mean;
    r.drift_se(i) = m.se;
    r.ks_p[i] = ks_normal(xi).p;
  }
  const CovarianceEstimate c = sample_covariance(inc);
  r.cov_rate = c.cov / T;
  r.cov_rate_se = c.se / T;
  r.drift_oracle = o.bbar;
  r.cov_target = o.onepoint_target();
  r.C00 = o.C00;
  auto within = [&](const Mat& est, const Mat& se, const Mat& target) {
    return ((est - target).cwiseAbs().array() <= nsigma * se.array()).all();
  };
  r.drift_pass = within(r.drift, r.drift_se, r.drift_oracle);
  r.cov_pass = within(r.cov_rate, r.cov_rate_se, r.cov_target);
  r.cov_pass_C00 = within(r.cov_rate, r.cov_rate_se, r.C00);
  r.ks_pass = std::all_of(r.ks_p.begin(), r.ks_p.end(), [](double p) { return p > 0.01; });
  return r;
}

TwoPointReport empirical_twopoint(const std::vector<Vec>& inc_x, const std::vector<Vec>& inc_y, double T,
                                  const Mat& oracle, double nsigma) {
  const CovarianceEstimate c = cross_covariance(inc_x, inc_y);
  TwoPointReport r;
  r.cross_rate = c.cov / T;
  r.cross_se = c.se / T;
  r.oracle = oracle;
  r.pass = ((r.cross_rate - oracle).cwiseAbs().array() <= nsigma * r.cross_se.array()).all();
  return r;
}

LocalizationSample localization_sample(const FieldRealization& F, const Vec& v, double eps, double T,
                                       const std::vector<Vec>& K, const std::vector<double>& radii,
                                       int record_every) {
  if (radii.empty()) throw ArgumentError("localization needs at least one radius");
  for (size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw ArgumentError("localization radii must increase");
  for (const Vec& x : K)
    if (!(x.norm() < radii[0] / 2)) throw ArgumentError("K must lie inside B(0, R_min/2)");
  LocalizationSample out;
  out.nonexit.assign(radii.size(), true);
  out.distance.assign(radii.size() - 1, 0.0);
  std::vector<std::vector<Path>> paths(radii.size());
  for (size_t r = 0; r < radii.size(); ++r) {
    TrajectoryOptions opt;
    opt.R = radii[r];
    opt.record_every = record_every;
    for (const Vec& x : K) {
      paths[r].push_back(rescaled_trajectory(F, v, eps, T, x, opt));
      if (!(paths[r].back().max_norm < radii[r])) out.nonexit[r] = false;
    }
  }
  for (size_t r = 0; r + 1 < radii.size(); ++r)
    for (size_t k = 0; k < K.size(); ++k)
      for (size_t i = 0; i < paths[r][k].x.size(); ++i)
        out.distance[r] = std::max(out.distance[r], (paths[r][k].x[i] - paths[r + 1][k].x[i]).norm());
  return out;
}

LocalizationTable localization_table(const std::vector<LocalizationSample>& samples,
                                     const std::vector<double>& radii) {
  LocalizationTable t;
  t.radii = radii;
  const size_t nr = radii.size();
  for (size_t r = 0; r < nr; ++r) {
    int ok = 0;
    for (const auto& s : samples) ok += s.nonexit[r] ? 1 : 0;
    t.nonexit_fraction.push_back(samples.empty() ? 0.0 : static_cast<double>(ok) / samples.size());
    if (r > 0 && t.nonexit_fraction[r] < t.nonexit_fraction[r - 1]) t.monotone = false;
  }
  for (size_t r = 0; r + 1 < nr; ++r) {
    std::vector<double> ds;
    for (const auto& s : samples) {
      ds.push_back(s.distance[r]);
      if (s.nonexit[r] && s.distance[r] != 0.0) t.zero_on_nonexit = false;
    }
    t.median_distance.push_back(ds.empty() ? 0.0 : median(ds));
    t.max_distance.push_back(ds.empty() ? 0.0 : *std::max_element(ds.begin(), ds.end()));
  }
  return t;
}

}  // namespace roughflow

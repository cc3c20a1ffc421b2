#include "roughflow/tightness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roughflow/errors.hpp"
#include "roughflow/parallel.hpp"
#include "roughflow/philox.hpp"
#include "roughflow/stats.hpp"
#include "roughflow/turbulence.hpp"

namespace roughflow {

namespace {
constexpr uint64_t kTightnessTag = 0x7469676874ull;
constexpr uint64_t kDavydovTag = 0x64617679ull;

// index offset of a time on the row grid; must be an even integer
long row_offset(double tau, double speed, double eps, double delta) {
  const double q = tau * speed / (eps * eps * delta);
  const long k = std::llround(q);
  if (std::abs(q - k) > 1e-6 || k % 2 != 0)
    throw ArgumentError("tightness times must map to even multiples of the row spacing (t |v| / eps^2 / delta)");
  return k;
}
}  // namespace

void TightnessSetup::validate(double eps) const {
  spec.validate();
  tp.validate();
  if (spec.d != 2 || tp.d != 2) throw ArgumentError("tightness grids are implemented for d = 2");
  if (!(speed > 0)) throw ConstraintError("v != 0", "non-zero mean velocity required");
  if (!(R > 0) || !(dx > 0) || sub < 2 || sub % 2) throw ArgumentError("tightness grid needs R, dx > 0 and even sub >= 2");
  const double n = 4 * R / dx;
  if (std::abs(n - std::round(n)) > 1e-9) throw ArgumentError("4R must be a multiple of dx");
  if (!(s < t)) throw ArgumentError("tightness needs s < t");
  if (batches < 2) throw ArgumentError("tightness needs at least 2 seed batches");
  const double delta = dx / sub;
  row_offset(s, speed, eps, delta);
  row_offset(t, speed, eps, delta);
}

DriverGrid tightness_grid(const TightnessSetup& st, double eps, uint64_t seed) {
  st.validate(eps);
  const int d = 2;
  const double delta = st.dx / st.sub, c = st.speed, e2 = eps * eps;
  const int n = static_cast<int>(std::llround(4 * st.R / st.dx)) + 1;
  const double lo = -2 * st.R;
  const long ka = row_offset(st.s, c, eps, delta), kb = row_offset(st.t, c, eps, delta);
  const long K = static_cast<long>(n - 1) * st.sub + kb;  // last sample index
  FieldBox box{{lo, lo}, {lo + K * delta, -lo}};
  const FieldRealization F(st.spec, seed, box);
  const Cutoff chi{st.R};

  DriverGrid g;
  g.n = n;
  g.lo = lo;
  g.V.assign(static_cast<size_t>(n) * n, Vec::Zero(d));
  g.W.assign(static_cast<size_t>(n) * n, Vec::Zero(d));

  std::vector<Vec> G(K + 1), Kv(K + 1);
  std::vector<Mat> H(K + 1), J(K + 1);
  Vec f(d), f1(d), fp(d), fp1(d);
  Mat Df(d, d), Df1(d, d), Dfp(d, d), Dfp1(d, d);
  FieldJet fj;
  auto sample = [&](long k, double y2, Vec& val, Mat& jac, Vec& dval, Mat& djac) {
    const double z[2] = {lo + k * delta, y2};
    F.eval(z, 2, fj);
    for (int a = 0; a < d; ++a) {
      val(a) = fj.v[a];
      dval(a) = fj.j[a][0];
      for (int i = 0; i < d; ++i) {
        jac(a, i) = fj.j[a][i];
        djac(a, i) = fj.h[a][i][0];
      }
    }
  };
  for (int row = 0; row < n; ++row) {
    const double y2 = lo + row * st.dx;
    bool any = false;
    for (int col = 0; col < n; ++col) {
      const double y[2] = {lo + col * st.dx, y2};
      if (chi.value(y, d) > 0) any = true;
    }
    if (!any) continue;
    // trapezoid with end corrections for G = int F and H = int DF
    std::vector<Vec> Fs(K + 1);
    std::vector<Mat> DFs(K + 1);
    sample(0, y2, f, Df, fp, Dfp);
    Fs[0] = f;
    DFs[0] = Df;
    G[0] = Vec::Zero(d);
    H[0] = Mat::Zero(d, d);
    for (long k = 0; k < K; ++k) {
      sample(k + 1, y2, f1, Df1, fp1, Dfp1);
      G[k + 1] = G[k] + 0.5 * delta * (f + f1) + delta * delta / 12.0 * (fp - fp1);
      H[k + 1] = H[k] + 0.5 * delta * (Df + Df1) + delta * delta / 12.0 * (Dfp - Dfp1);
      Fs[k + 1] = f1;
      DFs[k + 1] = Df1;
      f = f1;
      Df = Df1;
      fp = fp1;
      Dfp = Dfp1;
    }
    // Simpson on even indices for K = int (DF G - H F) and J = int (F G^T - G F^T)
    Kv[0] = Vec::Zero(d);
    J[0] = Mat::Zero(d, d);
    auto kap = [&](long k) -> Vec { return DFs[k] * G[k] - H[k] * Fs[k]; };
    auto jay = [&](long k) -> Mat { return Fs[k] * G[k].transpose() - G[k] * Fs[k].transpose(); };
    for (long k = 0; k + 2 <= K; k += 2) {
      Kv[k + 2] = Kv[k] + delta / 3.0 * (kap(k) + 4.0 * kap(k + 1) + kap(k + 2));
      J[k + 2] = J[k] + delta / 3.0 * (jay(k) + 4.0 * jay(k + 1) + jay(k + 2));
    }
    const double cv = eps / c, cw = 0.5 * e2 / (c * c);
    for (int col = 0; col < n; ++col) {
      const double y[2] = {lo + col * st.dx, y2};
      double gr[2];
      const double ch = chi.eval(y, d, gr);
      if (ch == 0.0) continue;
      const long a = static_cast<long>(col) * st.sub + ka, b = static_cast<long>(col) * st.sub + kb;
      const Vec dG = G[b] - G[a];
      const Vec WF = cw * (Kv[b] - Kv[a] - (H[b] - H[a]) * G[a] + H[a] * dG);
      const Mat A = cw * (J[b] - J[a] - dG * G[a].transpose() + G[a] * dG.transpose());
      const Vec gv = Vec{{gr[0], gr[1]}};
      g.V[row * n + col] = ch * cv * dG;
      g.W[row * n + col] = ch * ch * WF + ch * (A * gv);
    }
  }
  return g;
}

namespace {

struct SigmaPoint {
  int m1, m2;
  double norm;
  bool axis;
};

std::vector<SigmaPoint> sigma_lattice(double dx) {
  std::vector<SigmaPoint> out;
  const int mmax = static_cast<int>(std::floor(1.0 / dx + 1e-9));
  for (int m1 = -mmax; m1 <= mmax; ++m1)
    for (int m2 = -mmax; m2 <= mmax; ++m2) {
      if (m1 == 0 && m2 == 0) continue;
      const double r = dx * std::hypot(m1, m2);
      if (r > 1.0 + 1e-12) continue;
      out.push_back({m1, m2, r, (std::abs(m1) + std::abs(m2)) == 1});
    }
  return out;
}

// accumulated moments over a set of seeds
struct Moments {
  std::vector<double> v0, w0;   // per y
  std::vector<double> v3, w2;   // per (sigma, y on the extended grid)
  int count = 0;
};

}  // namespace

MomentStatistic moment_statistic(const TightnessSetup& st, double eps, const std::vector<DriverGrid>& grids) {
  st.validate(eps);
  if (grids.size() < static_cast<size_t>(st.batches)) throw ArgumentError("tightness needs at least one seed per batch");
  const double a = st.tp.a, p = st.tp.p, r = st.tp.r;
  const int k1 = st.tp.k1, d = 2;
  const int n = grids[0].n;
  const int ext = static_cast<int>(std::ceil(k1 / st.dx - 1e-9));
  const int ne = n + 2 * ext;
  const auto sig = sigma_lattice(st.dx);
  const size_t ny = static_cast<size_t>(ne) * ne;
  const double tau = st.t - st.s;
  const double wv = std::pow(tau, -a / p), ww = std::pow(tau, -2 * a / p);
  const double cell = st.dx * st.dx;

  auto at = [&](const std::vector<Vec>& f, int i, int j) -> const Vec* {
    if (i < 0 || j < 0 || i >= n || j >= n) return nullptr;
    return &f[static_cast<size_t>(i) * n + j];
  };
  auto choose = [](int m, int j) {
    double c = 1;
    for (int q = 1; q <= j; ++q) c = c * (m - j + q) / q;
    return c;
  };
  std::vector<double> binom(k1 + 1), binomw(k1);
  for (int j = 0; j <= k1; ++j) binom[j] = ((k1 - j) % 2 ? -1.0 : 1.0) * choose(k1, j);
  for (int j = 0; j < k1; ++j) binomw[j] = ((k1 - 1 - j) % 2 ? -1.0 : 1.0) * choose(k1 - 1, j);

  std::vector<Moments> batch(st.batches);
  for (auto& m : batch) {
    m.v0.assign(static_cast<size_t>(n) * n, 0.0);
    m.w0.assign(static_cast<size_t>(n) * n, 0.0);
    m.v3.assign(sig.size() * ny, 0.0);
    m.w2.assign(sig.size() * ny, 0.0);
  }
  Vec acc(d);
  for (size_t sidx = 0; sidx < grids.size(); ++sidx) {
    const DriverGrid& g = grids[sidx];
    Moments& m = batch[sidx % st.batches];
    ++m.count;
    for (size_t q = 0; q < g.V.size(); ++q) {
      m.v0[q] += std::pow(g.V[q].norm(), 2 * a);
      m.w0[q] += std::pow(g.W[q].norm(), a);
    }
    for (size_t si = 0; si < sig.size(); ++si) {
      const int m1 = sig[si].m1, m2 = sig[si].m2;
      for (int i = -ext; i < n + ext; ++i)
        for (int j = -ext; j < n + ext; ++j) {
          const size_t q = si * ny + static_cast<size_t>(i + ext) * ne + (j + ext);
          // sigma = dx (m1, m2) acts on (col, row) = (j, i)
          bool any = false;
          acc.setZero();
          for (int l = 0; l <= k1; ++l)
            if (const Vec* v = at(g.V, i + l * m2, j + l * m1)) {
              acc += binom[l] * (*v);
              any = true;
            }
          if (any) m.v3[q] += std::pow(acc.norm(), 2 * a);
          any = false;
          acc.setZero();
          for (int l = 0; l <= k1 - 1; ++l)
            if (const Vec* w = at(g.W, i + l * m2, j + l * m1)) {
              acc += binomw[l] * (*w);
              any = true;
            }
          if (any) m.w2[q] += std::pow(acc.norm(), a);
        }
    }
  }

  const double rho = st.dx / std::sqrt(std::numbers::pi);
  const double ev = (1.0 - r) * a;  // small-sigma exponent of both difference integrands
  auto evaluate = [&](const std::vector<const Moments*>& ms) {
    std::array<double, 4> out{};
    int cnt = 0;
    for (auto* m : ms) cnt += m->count;
    auto mean_at = [&](auto member, size_t q) {
      double s = 0;
      for (auto* m : ms) s += (m->*member)[q];
      return s / cnt;
    };
    for (size_t q = 0; q < static_cast<size_t>(n) * n; ++q) {
      out[0] += cell * std::sqrt(mean_at(&Moments::v0, q)) * wv;
      out[1] += cell * mean_at(&Moments::w0, q) * ww;
    }
    double cv = 0, cw = 0;
    int naxis = 0;
    for (size_t si = 0; si < sig.size(); ++si) {
      double gv = 0, gw = 0;
      for (size_t y = 0; y < ny; ++y) {
        gv += cell * std::sqrt(mean_at(&Moments::v3, si * ny + y));
        gw += cell * mean_at(&Moments::w2, si * ny + y);
      }
      const double rs = sig[si].norm;
      out[2] += cell * gv * wv / std::pow(rs, (2 + r) * a + d);
      out[3] += cell * gw * ww / std::pow(rs, (1 + r) * a + d);
      if (sig[si].axis) {
        cv += gv / std::pow(rs, k1 * a);
        cw += gw / std::pow(rs, (k1 - 1) * a);
        ++naxis;
      }
    }
    // disc of area dx^2 around sigma = 0, integrand ~ c |sigma|^{(1-r)a - d}
    const double inner = 2 * std::numbers::pi * std::pow(rho, ev) / ev;
    out[2] += cv / naxis * inner * wv;
    out[3] += cw / naxis * inner * ww;
    return out;
  };

  std::vector<const Moments*> all;
  for (auto& m : batch) all.push_back(&m);
  const auto full = evaluate(all);
  std::vector<std::array<double, 4>> per;
  for (auto& m : batch) per.push_back(evaluate({&m}));
  MomentStatistic ms;
  ms.eps = eps;
  ms.seeds = static_cast<int>(grids.size());
  for (int k = 0; k < 4; ++k) {
    std::vector<double> xs;
    for (auto& b : per) xs.push_back(b[k]);
    ms.s[k].estimate = full[k];
    ms.s[k].se = std::sqrt(sample_variance(xs) / xs.size());
  }
  return ms;
}

MomentStatistic tightness_statistic(const TightnessSetup& st, double eps, uint64_t master, int seeds, int workers) {
  st.validate(eps);
  const auto grids = parallel_map<DriverGrid>(seeds, workers, [&](int i) {
    return tightness_grid(st, eps, mix_seed(master, kTightnessTag, static_cast<uint64_t>(i)));
  });
  return moment_statistic(st, eps, grids);
}

UniformityReport uniformity(const std::vector<MomentStatistic>& stats, double max_ratio, double max_slope) {
  if (stats.size() < 2) throw ArgumentError("uniformity needs at least 2 epsilon values");
  UniformityReport u;
  u.pass = true;
  for (int k = 0; k < 4; ++k) {
    double mx = 0, mn = 1e300;
    std::vector<double> le, ls;
    for (const auto& s : stats) {
      mx = std::max(mx, s.s[k].estimate);
      mn = std::min(mn, s.s[k].estimate);
      le.push_back(std::log(s.eps));
      ls.push_back(std::log(std::max(s.s[k].estimate, 1e-300)));
    }
    u.ratio[k] = mn > 0 ? mx / mn : (mx == 0 ? 1.0 : INFINITY);
    u.slope[k] = mx > 0 ? linear_fit(le, ls).slope : 0.0;
    if (!(u.ratio[k] <= max_ratio && std::abs(u.slope[k]) <= max_slope)) u.pass = false;
  }
  return u;
}

AdmissibilityAudit admissibility_audit(long n, uint64_t seed) {
  const CounterRng rng(seed);
  AdmissibilityAudit au;
  for (long i = 0; i < n; ++i) {
    const uint32_t lo = static_cast<uint32_t>(i), hi = static_cast<uint32_t>(i >> 32);
    TightnessParams tp;
    tp.p = 1.5 + 2.0 * rng.uniform(lo, hi, 1, 0);
    tp.r = rng.uniform(lo, hi, 2, 0);
    tp.a = 0.5 + 40.0 * rng.uniform(lo, hi, 3, 0);
    tp.d = 1 + static_cast<int>(3 * rng.uniform(lo, hi, 4, 0));
    ++au.tested;
    if (!tp.admissible()) continue;
    ++au.accepted;
    // the displayed chain, rearranged: x = 2ap/(2a - p) - 2
    const double p = tp.p, r = tp.r, a = tp.a;
    bool ok = 2 * a > p;
    const double x = ok ? 2 * a * p / (2 * a - p) - 2 : 0;
    ok = ok && x > 0 && x < r - tp.d / a;
    const double pp = tp.p_prime(), rp = tp.r_prime();
    ok = ok && rp < r - tp.d / a && 1.0 / pp > 1.0 / 3 && 1.0 / pp < 1.0 / p - 1.0 / (2 * a) && pp < 2 + rp &&
         2 + rp < 3;
    if (!ok) ++au.false_accepts;
  }
  return au;
}

DavydovResult davydov_check(const KernelSpec& spec, double u, double p1, double p2, double p3, uint64_t master,
                            int samples, int workers) {
  if (std::abs(1 / p1 + 1 / p2 + 1 / p3 - 1) > 1e-12) throw ArgumentError("Davydov exponents need 1/p1 + 1/p2 + 1/p3 = 1");
  if (samples < 2) throw ArgumentError("Davydov check needs at least 2 samples");
  const int d = spec.d;
  FieldBox box;
  box.lo.assign(d, -0.5);
  box.hi.assign(d, 0.5);
  box.hi[0] = u + 0.5;
  const auto xy = parallel_map<std::pair<double, double>>(samples, workers, [&](int i) {
    const FieldRealization F(spec, mix_seed(master, kDavydovTag, static_cast<uint64_t>(i)), box);
    Vec x0 = Vec::Zero(d), x1 = Vec::Zero(d);
    x1(0) = u;
    return std::make_pair(F.value(x0)(0), F.value(x1)(0));
  });
  std::vector<double> X, Y, P;
  for (auto& [a, b] : xy) {
    X.push_back(a);
    Y.push_back(b);
  }
  const double mx = mean(X), my = mean(Y);
  for (size_t i = 0; i < X.size(); ++i) P.push_back((X[i] - mx) * (Y[i] - my));
  DavydovResult r;
  const MeanSE c = mean_se(P);
  r.lhs = std::abs(c.mean * samples / (samples - 1.0));
  r.lhs_se = c.se;
  double nx = 0, ny = 0;
  for (size_t i = 0; i < X.size(); ++i) {
    nx += std::pow(std::abs(X[i]), p2);
    ny += std::pow(std::abs(Y[i]), p3);
  }
  const MixingProfile mp{spec.range(), 0.1, 8.0};
  r.alpha = mp.alpha(u);
  r.rhs_core = std::pow(r.alpha, 1 / p1) * std::pow(nx / samples, 1 / p2) * std::pow(ny / samples, 1 / p3);
  r.ratio = r.rhs_core > 0 ? r.lhs / r.rhs_core : 0.0;
  return r;
}

}  // namespace roughflow

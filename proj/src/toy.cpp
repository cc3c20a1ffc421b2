#include "roughflow/toy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "roughflow/errors.hpp"

namespace roughflow {

using cplx = std::complex<double>;

PhaseFunction tanh_phase(double a, const Vec& k) {
  PhaseFunction p;
  p.eval = [a, k](const Vec& x) {
    const double u = k.dot(x), t = std::tanh(u), t1 = 1 - t * t, t2 = -2 * t * t1,
                 t3 = -2 * (t1 * t1 + t * t2);
    ScalarJet j;
    j.value = 1.0 + a * t;
    j.grad = a * t1 * k;
    j.hess = a * t2 * k * k.transpose();
    for (int l = 0; l < k.size(); ++l) j.third.push_back(a * t3 * k(l) * k * k.transpose());
    return j;
  };
  const double kn = k.norm();
  p.c3_bound = 1.0 + std::abs(a) * (1.0 + kn + 0.77 * kn * kn + 2.0 * kn * kn * kn);
  return p;
}

PhaseFunction constant_phase(double c) {
  PhaseFunction p;
  p.eval = [c](const Vec& x) {
    ScalarJet j;
    const int d = static_cast<int>(x.size());
    j.value = c;
    j.grad = Vec::Zero(d);
    j.hess = Mat::Zero(d, d);
    j.third.assign(d, Mat::Zero(d, d));
    return j;
  };
  p.c3_bound = std::abs(c);
  return p;
}

PhaseFunction affine_phase(double c, const Vec& g) {
  PhaseFunction p;
  p.eval = [c, g](const Vec& x) {
    ScalarJet j;
    const int d = static_cast<int>(x.size());
    j.value = c + g.dot(x);
    j.grad = g;
    j.hess = Mat::Zero(d, d);
    j.third.assign(d, Mat::Zero(d, d));
    return j;
  };
  p.c3_bound = std::abs(c) + g.norm();
  return p;
}

namespace {

Vec E(double th) { return Vec{{std::cos(th), std::sin(th)}}; }
Vec E1(double th) { return Vec{{-std::sin(th), std::cos(th)}}; }

cplx expi(double th) { return {std::cos(th), std::sin(th)}; }
Vec as_vec(cplx z) { return Vec{{z.real(), z.imag()}}; }

// int_s^t r e^{i w r} dr and int_s^t e^{i w r} dr
cplx int_r_exp(double w, double s, double t, int nq) {
  if (std::abs(w) * (t - s) < 1e-2) {
    cplx acc = 0;
    gauss_panel(gauss_legendre(nq), s, t, [&](double r, double wt) { acc += wt * r * expi(w * r); });
    return acc;
  }
  auto F = [w](double r) { return expi(w * r) * (r / cplx(0, w) + 1.0 / (w * w)); };
  return F(t) - F(s);
}

cplx int_exp(double w, double s, double t, int nq) {
  if (std::abs(w) * (t - s) < 1e-2) {
    cplx acc = 0;
    gauss_panel(gauss_legendre(nq), s, t, [&](double r, double wt) { acc += wt * expi(w * r); });
    return acc;
  }
  return (expi(w * t) - expi(w * s)) / cplx(0, w);
}

}  // namespace

Vec toy_first_level(const PhaseFunction& f, double s, double t, const Vec& x) {
  const double fx = f.eval(x).value;
  return E(fx * t) - E(fx * s);
}

Jet toy_first_level_jet(const PhaseFunction& f, double s, double t, const Vec& x, int order) {
  if (order > 2) throw CapabilityError("closed-form toy first level provides jets to order 2");
  const ScalarJet p = f.eval(x);
  Jet j(2, order);
  if (s == t) return j;
  const double a = p.value * s, b = p.value * t;
  j.value = E(b) - E(a);
  if (order >= 1) {
    const Vec d1 = t * E1(b) - s * E1(a);
    j.jac = d1 * p.grad.transpose();
    if (order >= 2) {
      const Vec d2 = -(t * t * E(b) - s * s * E(a));
      for (int k = 0; k < 2; ++k)
        j.hess[k] = d2 * (p.grad(k) * p.grad.transpose()) + d1 * p.hess.row(k);
    }
  }
  return j;
}

Vec toy_second_level_main(const PhaseFunction& f, double s, double t, const Vec& x) {
  const ScalarJet p = f.eval(x);
  return -0.25 * (t * t - s * s) * p.value * p.grad;
}

Vec toy_second_level(const PhaseFunction& f, double s, double t, const Vec& x, const QuadConfig& quad) {
  if (s == t) return Vec::Zero(2);
  const ScalarJet p = f.eval(x);
  const double fx = p.value;
  const cplx g(p.grad(0), p.grad(1)), gb = std::conj(g);
  const int nq = std::max(quad.order, 8);
  // 1/2 (DV_ts) V_ts with (DV_ts) w = i (t e^{ift} - s e^{ifs}) <grad f, w>
  const cplx V = expi(fx * t) - expi(fx * s);
  const cplx dv = cplx(0, 1) * (t * expi(fx * t) - s * expi(fx * s));
  const cplx first = 0.5 * dv * (gb * V).real();
  // - int_s^t (DV_rs) v_r dr
  const cplx I1 = int_r_exp(2 * fx, s, t, nq);
  const cplx I2 = expi(fx * s) * int_exp(fx, s, t, nq);
  const cplx I3 = expi(fx * s) * int_exp(-fx, s, t, nq);
  const cplx second = 0.5 * fx * (gb * I1 - 0.5 * g * (t * t - s * s) - s * gb * I2 + s * g * I3);
  return as_vec(first + second);
}

SmoothVectorField toy_field(const PhaseFunction& f) {
  SmoothVectorField v;
  v.dim = 2;
  v.max_order = 3;
  v.eval = [f](double t, const Vec& x, int order) {
    const ScalarJet p = f.eval(x);
    const double ph = p.value, th = ph * t;
    const Vec e = E1(th), e1 = -E(th), e2 = -e, e3 = -e1;
    Jet j(2, order);
    j.value = ph * e;
    if (order >= 1) {
      const Vec G1 = e + ph * t * e1;
      j.jac = G1 * p.grad.transpose();
      if (order >= 2) {
        const Vec G2 = 2 * t * e1 + ph * t * t * e2;
        for (int k = 0; k < 2; ++k) j.hess[k] = G2 * (p.grad(k) * p.grad.transpose()) + G1 * p.hess.row(k);
        if (order >= 3) {
          const Vec G3 = 3 * t * t * e2 + ph * t * t * t * e3;
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) {
              Mat m(2, 2);
              for (int jj = 0; jj < 2; ++jj) {
                const double c3 = p.grad(jj) * p.grad(k) * p.grad(l);
                const double c2 = p.hess(jj, k) * p.grad(l) + p.hess(jj, l) * p.grad(k) + p.hess(k, l) * p.grad(jj);
                const double c1 = p.third[l](jj, k);
                m.col(jj) = G3 * c3 + G2 * c2 + G1 * c1;
              }
              j.third[k][l] = m;
            }
        }
      }
    }
    return j;
  };
  return v;
}

void ToyDriverFamily::validate() const {
  if (!(eps > 0 && eps <= 1)) throw ArgumentError("toy epsilon must lie in (0,1]");
  if (!(T > 0)) throw ArgumentError("toy horizon must be positive");
}

RoughDriver rescaled_driver(const ToyDriverFamily& fam, const QuadConfig& quad) {
  fam.validate();
  const double e = fam.eps, e2 = e * e;
  const PhaseFunction f = fam.f;
  RoughDriver d;
  d.V.dim = d.W.dim = 2;
  d.V.horizon = d.W.horizon = fam.T;
  d.V.max_order = 2;
  d.W.max_order = 1;
  d.V.eval = [f, e, e2](double s, double t, const Vec& x, int order) {
    Jet j = toy_first_level_jet(f, s / e2, t / e2, e2 * x, order);
    j.value *= e;
    if (order >= 1) j.jac *= e * e2;
    if (order >= 2)
      for (auto& h : j.hess) h *= e * e2 * e2;
    return j;
  };
  d.W.eval = [f, e2, quad](double s, double t, const Vec& x, int order) {
    auto w = [&](const Vec& y) { return Vec(e2 * e2 * toy_second_level(f, s / e2, t / e2, e2 * y, quad)); };
    Jet j(2, order);
    j.value = w(x);
    // jacobian only feeds the driver norm; central differences are accurate to ~1e-10 here
    if (order >= 1) {
      const double h = 1e-4;
      for (int k = 0; k < 2; ++k) {
        Vec xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        j.jac.col(k) = (w(xp) - w(xm)) / (2 * h);
      }
    }
    return j;
  };
  return d;
}

RoughDriver limit_driver(const PhaseFunction& f, double T) {
  const Vec c = f.f0() * f.grad0();
  RoughDriver d = zero_driver(2, T);
  d.W.eval = [c](double s, double t, const Vec&, int order) {
    Jet j(2, order);
    j.value = -0.25 * (t * t - s * s) * c;
    return j;
  };
  return d;
}

Vec limit_flow(const PhaseFunction& f, double t, const Vec& x) {
  return x - 0.25 * t * t * f.f0() * f.grad0();
}

std::vector<double> toy_report_times(const ToyReportConfig& c) {
  std::vector<double> ts;
  for (int i = 0; i <= c.uniform_points; ++i) ts.push_back(c.T * i / c.uniform_points);
  for (int j = 0; j < c.geometric_points; ++j) {
    const double fr = static_cast<double>(j) / (c.geometric_points - 1);
    ts.push_back(c.T * std::pow(c.geometric_min, 1.0 - fr));
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

ToyReport convergence_report(const PhaseFunction& f, const std::vector<double>& eps_list,
                             const SpatialDomain& dom, const ToyReportConfig& cfg) {
  if (eps_list.size() < 3) throw ArgumentError("convergence report needs at least 3 epsilon values");
  if (!(cfg.gamma > 0 && cfg.gamma < 0.5)) throw ArgumentError("gamma must lie in (0, 1/2)");
  const auto ts = toy_report_times(cfg);
  const auto xs = dom.points();
  const RoughDriver lim = limit_driver(f, cfg.T);
  const Vec c = f.f0() * f.grad0();
  const Vec target_half = cfg.x0 - 0.5 * cfg.T * c;
  const Vec target_lim = limit_flow(f, cfg.T, cfg.x0);

  ToyReport rep;
  rep.gamma = cfg.gamma;
  for (double eps : eps_list) {
    ToyDriverFamily fam{eps, f, cfg.T};
    const RoughDriver drv = rescaled_driver(fam);
    ToyReportRow row;
    row.eps = eps;
    for (size_t i = 0; i < ts.size(); ++i)
      for (size_t j = i + 1; j < ts.size(); ++j) {
        const double s = ts[i], t = ts[j], dt = t - s;
        double v0 = 0, v1 = 0, w0 = 0;
        for (const Vec& x : xs) {
          const Jet V = drv.V(s, t, x, 1);
          v0 = std::max(v0, V.value.norm());
          v1 = std::max(v1, V.jac.norm());
          w0 = std::max(w0, (drv.W(s, t, x, 0).value - lim.W(s, t, x, 0).value).norm());
        }
        row.v_dist = std::max(row.v_dist, (v0 + v1) / std::pow(dt, cfg.gamma));
        row.w_dist = std::max(row.w_dist, w0 / std::pow(dt, 2 * cfg.gamma));
      }
    SolverConfig sc;
    const int n = std::max(cfg.min_steps, static_cast<int>(std::ceil(cfg.T / (eps * eps * cfg.step_eps2_fraction))));
    sc.refinement = n;
    const FlowMap fm = solve_flow(drv, sc, TimeGrid({0.0, cfg.T}));
    const Vec end = fm(0.0, cfg.T, cfg.x0);
    row.flow_err = (end - target_half).norm();
    row.flow_err_limit = (end - target_lim).norm();
    row.flow_err_corrected = (end - target_lim - drv.V(0.0, cfg.T, cfg.x0, 0).value).norm();
    rep.rows.push_back(row);
  }
  std::vector<double> e, v;
  for (const auto& r : rep.rows) {
    e.push_back(r.eps);
    v.push_back(r.v_dist);
  }
  rep.slope = loglog_slope(e, v);
  return rep;
}

}  // namespace roughflow

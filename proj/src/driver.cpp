#include "roughflow/driver.hpp"

#include <cmath>

#include "roughflow/besov.hpp"
#include "roughflow/errors.hpp"

namespace roughflow {

SpatialDomain::SpatialDomain(int d, double lo_, double hi_, int res_)
    : dim(d), lo(d, lo_), hi(d, hi_), res(d, res_) {
  validate();
}

SpatialDomain::SpatialDomain(std::vector<double> lo_, std::vector<double> hi_, std::vector<int> res_)
    : dim(static_cast<int>(lo_.size())), lo(std::move(lo_)), hi(std::move(hi_)), res(std::move(res_)) {
  validate();
}

void SpatialDomain::validate() const {
  if (dim < 1) throw ArgumentError("domain dimension must be >= 1");
  if ((int)lo.size() != dim || (int)hi.size() != dim || (int)res.size() != dim)
    throw ArgumentError("domain box/resolution size mismatch");
  for (int a = 0; a < dim; ++a) {
    if (!(hi[a] > lo[a])) throw ArgumentError("degenerate domain box");
    if (res[a] < 2) throw ArgumentError("domain resolution must be >= 2 per axis");
  }
}

std::vector<Vec> SpatialDomain::points() const {
  std::vector<Vec> out;
  std::vector<int> idx(dim, 0);
  while (true) {
    Vec x(dim);
    for (int a = 0; a < dim; ++a) x(a) = lo[a] + spacing(a) * idx[a];
    out.push_back(x);
    int a = 0;
    while (a < dim && ++idx[a] == res[a]) idx[a++] = 0;
    if (a == dim) break;
  }
  return out;
}

TimeGrid::TimeGrid(std::vector<double> pts) : t(std::move(pts)) {
  if (t.size() < 2) throw ArgumentError("time grid needs at least two points");
  if (t.front() != 0.0) throw ArgumentError("time grid must start at 0");
  for (size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw ArgumentError("time grid must be strictly increasing");
}

TimeGrid TimeGrid::uniform(double T, int n) {
  if (!(T > 0) || n < 1) throw ArgumentError("uniform grid needs T > 0 and n >= 1");
  std::vector<double> p(n + 1);
  for (int i = 0; i <= n; ++i) p[i] = T * i / n;
  p[n] = T;
  return TimeGrid(std::move(p));
}

Jet SmoothVectorField::operator()(double t, const Vec& x, int order) const {
  if (order > max_order) throw CapabilityError("field derivative order not available");
  Jet j = eval(t, x, order);
  if (!j.finite()) throw EvaluationError("non-finite vector field value");
  return j;
}

Jet TwoTimeVectorField::operator()(double s, double t, const Vec& x, int order) const {
  if (order > max_order) throw CapabilityError("two-time field derivative order not available");
  if (s == t) return Jet(dim, order);
  return eval(s, t, x, order);
}

void DriverRegularity::validate() const {
  if (!(p >= 2.0 && p < 2.0 + r && 2.0 + r < 3.0))
    throw ConstraintError("2 <= p < 2 + r < 3", "driver regularity violates 2 <= p < 2 + r < 3");
  if (!(p / 3.0 < r)) throw ConstraintError("p/3 < r", "driver regularity violates p/3 < r");
}

static void check_order(double s, double u, double t) {
  if (!(s <= u && u <= t)) throw ArgumentError("times must satisfy s <= u <= t");
}

double additivity_defect(const TwoTimeVectorField& V, double s, double u, double t,
                         const SpatialDomain& dom) {
  check_order(s, u, t);
  double m = 0.0;
  for (const Vec& x : dom.points()) {
    Vec e = V(s, t, x, 0).value - V(u, t, x, 0).value - V(s, u, x, 0).value;
    m = std::max(m, e.norm());
  }
  return m;
}

double chen_defect(const RoughDriver& drv, double s, double u, double t, const SpatialDomain& dom) {
  check_order(s, u, t);
  if (drv.V.max_order < 1) throw CapabilityError("chen defect needs jacobians of V");
  double m = 0.0;
  for (const Vec& x : dom.points()) {
    Jet Vus = drv.V(s, u, x, 1), Vtu = drv.V(u, t, x, 1);
    Vec e = drv.W(s, t, x, 0).value - drv.W(u, t, x, 0).value - drv.W(s, u, x, 0).value -
            0.5 * lie_bracket(Vus, Vtu, 0).value;
    m = std::max(m, e.norm());
  }
  return m;
}

namespace {

std::vector<double> lift_breaks(const SmoothVectorField& v, const TimeGrid& g) {
  std::vector<double> b = g.t;
  b.insert(b.end(), v.breakpoints.begin(), v.breakpoints.end());
  return b;
}

}  // namespace

RoughDriver canonical_lift(const SmoothVectorField& v, const TimeGrid& grid, const QuadConfig& quad) {
  if (quad.substeps < 1) throw ArgumentError("quadrature substeps must be >= 1");
  if (quad.order < 1) throw ArgumentError("quadrature order must be >= 1");
  const GaussRule& rule = gauss_legendre(quad.order);
  const auto breaks = lift_breaks(v, grid);
  const int d = v.dim;
  const int nsub = quad.substeps;

  RoughDriver drv;
  drv.V.dim = drv.W.dim = d;
  drv.V.horizon = drv.W.horizon = grid.horizon();
  drv.V.max_order = v.max_order;
  drv.W.max_order = std::min(1, v.max_order - 1);

  drv.V.eval = [v, rule, breaks, d, nsub](double s, double t, const Vec& x, int order) {
    Jet acc(d, order);
    const auto pts = split_interval(s, t, breaks);
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
      const double h = (pts[k + 1] - pts[k]) / nsub;
      for (int j = 0; j < nsub; ++j) {
        const double a = pts[k] + j * h, b = (j + 1 == nsub) ? pts[k + 1] : a + h;
        gauss_panel(rule, a, b, [&](double u, double w) { acc.axpy(w, v(u, x, order)); });
      }
    }
    return acc;
  };

  drv.W.eval = [v, rule, breaks, d, nsub](double s, double t, const Vec& x, int order) {
    const int vo = order + 1;
    Jet Vacc(d, vo), Wacc(d, order);
    const auto pts = split_interval(s, t, breaks);
    std::vector<Jet> outer(rule.x.size());
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
      const double h = (pts[k + 1] - pts[k]) / nsub;
      for (int j = 0; j < nsub; ++j) {
        const double a = pts[k] + j * h, b = (j + 1 == nsub) ? pts[k + 1] : a + h;
        const double c = 0.5 * (a + b), hh = 0.5 * (b - a);
        for (size_t i = 0; i < rule.x.size(); ++i) {
          const double u = c + hh * rule.x[i];
          outer[i] = v(u, x, vo);
          Jet Vus = Vacc;
          gauss_panel(rule, a, u, [&](double uu, double ww) { Vus.axpy(ww, v(uu, x, vo)); });
          Wacc.axpy(0.5 * hh * rule.w[i], lie_bracket(Vus, outer[i], order));
        }
        for (size_t i = 0; i < rule.x.size(); ++i) Vacc.axpy(hh * rule.w[i], outer[i]);
      }
    }
    return Wacc;
  };
  return drv;
}

DriverNorm driver_holder_norm(const RoughDriver& drv, const DriverRegularity& reg,
                              const TimeGrid& grid, const SpatialDomain& dom) {
  if (grid.t.size() < 2) throw ArgumentError("empty time grid");
  const double av = reg.spatial(), aw = 1.0 + reg.r;
  DriverNorm n;
  const auto& T = grid.t;
  for (size_t i = 0; i < T.size(); ++i)
    for (size_t j = i + 1; j < T.size(); ++j) {
      const double s = T[i], t = T[j], dt = t - s;
      auto fv = [&](const Vec& x, int o) { return drv.V(s, t, x, o); };
      auto fw = [&](const Vec& x, int o) { return drv.W(s, t, x, o); };
      n.v_part = std::max(n.v_part, holder_space_norm(fv, av, dom).total() / std::pow(dt, 1.0 / reg.p));
      n.w_part = std::max(n.w_part, holder_space_norm(fw, aw, dom).total() / std::pow(dt, 2.0 / reg.p));
    }
  return n;
}

RoughDriver perturb_second_level(const RoughDriver& drv, TimePath X, int x_order) {
  RoughDriver out = drv;
  out.W.max_order = std::min(drv.W.max_order, x_order);
  auto W = drv.W.eval;
  out.W.eval = [W, X](double s, double t, const Vec& x, int order) {
    Jet r = W(s, t, x, order);
    r.axpy(1.0, X(t, x, order));
    r.axpy(-1.0, X(s, x, order));
    return r;
  };
  return out;
}

RoughDriver zero_driver(int dim, double horizon) {
  RoughDriver z;
  z.V.dim = z.W.dim = dim;
  z.V.horizon = z.W.horizon = horizon;
  z.V.max_order = 3;
  z.W.max_order = 3;
  z.V.eval = z.W.eval = [dim](double, double, const Vec&, int o) { return Jet(dim, o); };
  return z;
}

SmoothVectorField constant_field(const Vec& c) {
  SmoothVectorField f;
  f.dim = static_cast<int>(c.size());
  const int d = f.dim;
  f.eval = [c, d](double, const Vec&, int o) {
    Jet j(d, o);
    j.value = c;
    return j;
  };
  return f;
}

SmoothVectorField linear_field(const Mat& A) {
  SmoothVectorField f;
  f.dim = static_cast<int>(A.rows());
  const int d = f.dim;
  f.eval = [A, d](double, const Vec& x, int o) {
    Jet j(d, o);
    j.value = A * x;
    if (o >= 1) j.jac = A;
    return j;
  };
  return f;
}

SmoothVectorField piecewise_linear_field(const Mat& A, const Mat& B, double tb) {
  SmoothVectorField f;
  f.dim = static_cast<int>(A.rows());
  const int d = f.dim;
  f.breakpoints = {tb};
  f.eval = [A, B, tb, d](double t, const Vec& x, int o) {
    const Mat& M = t < tb ? A : B;
    Jet j(d, o);
    j.value = M * x;
    if (o >= 1) j.jac = M;
    return j;
  };
  return f;
}

}  // namespace roughflow

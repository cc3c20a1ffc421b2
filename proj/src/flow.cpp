#include "roughflow/flow.hpp"

#include <algorithm>
#include <cmath>

#include "roughflow/errors.hpp"

namespace roughflow {

void SolverConfig::validate() const {
  if (refinement < 1) throw ArgumentError("solver refinement must be >= 1");
}

Vec local_step(const RoughDriver& drv, const DriftField& V0, double s, double t, const Vec& x,
               double bound) {
  if (s > t) throw ArgumentError("local step needs s <= t");
  Jet V = drv.V(s, t, x, 1);
  Vec y = x + V.value + drv.W(s, t, x, 0).value + 0.5 * V.jac * V.value;
  if (V0) y += (t - s) * V0(x);
  if (!y.allFinite() || y.norm() > bound)
    throw DivergenceError("flow step diverged", s, t, std::vector<double>(x.data(), x.data() + x.size()));
  return y;
}

FlowMap::FlowMap(RoughDriver drv, DriftField V0, std::vector<double> partition, double bound)
    : drv_(std::move(drv)), V0_(std::move(V0)), part_(std::move(partition)), bound_(bound) {}

size_t FlowMap::index_of(double t) const {
  auto it = std::lower_bound(part_.begin(), part_.end(), t - 1e-12 * (1.0 + std::abs(t)));
  if (it == part_.end() || std::abs(*it - t) > 1e-12 * (1.0 + std::abs(t)))
    throw ArgumentError("flow evaluated at a time that is not a partition point");
  return static_cast<size_t>(it - part_.begin());
}

Vec FlowMap::operator()(double s, double t, const Vec& x) const {
  size_t i = index_of(s), j = index_of(t);
  if (i > j) throw ArgumentError("flow needs s <= t");
  Vec y = x;
  for (size_t k = i; k < j; ++k) y = local_step(drv_, V0_, part_[k], part_[k + 1], y, bound_);
  return y;
}

std::vector<Vec> FlowMap::path(double s, const Vec& x) const {
  size_t i = index_of(s);
  std::vector<Vec> out{x};
  Vec y = x;
  for (size_t k = i; k + 1 < part_.size(); ++k) {
    y = local_step(drv_, V0_, part_[k], part_[k + 1], y, bound_);
    out.push_back(y);
  }
  return out;
}

FlowMap solve_flow(const RoughDriver& drv, const SolverConfig& cfg, const TimeGrid& grid) {
  cfg.validate();
  const double cap = cfg.max_step > 0 ? cfg.max_step : grid.horizon() / 8.0;
  std::vector<double> part{grid.t.front()};
  for (size_t i = 0; i + 1 < grid.t.size(); ++i) {
    const double a = grid.t[i], b = grid.t[i + 1];
    int n = std::max(cfg.refinement, static_cast<int>(std::ceil((b - a) / cap - 1e-12)));
    for (int k = 1; k < n; ++k) part.push_back(a + (b - a) * k / n);
    part.push_back(b);
  }
  return FlowMap(drv, cfg.V0, std::move(part), cfg.divergence_bound);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("slope needs matching series of length >= 2");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 1e-13)) throw IndeterminateOrder("error below measurement floor 1e-13");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

static double flow_error(const FlowMap& a, const FlowReference& ref, double T, const std::vector<Vec>& xs) {
  double e = 0.0;
  for (const Vec& x : xs) e = std::max(e, (a(0.0, T, x) - ref(x)).norm());
  return e;
}

static void check_levels(const std::vector<int>& r) {
  if (r.size() < 3) throw ArgumentError("order estimate needs >= 3 refinement levels");
}

OrderResult order_estimate(const RoughDriver& drv, const FlowReference& reference,
                           const std::vector<int>& refinements, const TimeGrid& grid,
                           const std::vector<Vec>& xs, const SolverConfig& base) {
  check_levels(refinements);
  OrderResult res;
  const double T = grid.horizon();
  for (int n : refinements) {
    SolverConfig c = base;
    c.refinement = n;
    FlowMap fm = solve_flow(drv, c, grid);
    res.steps.push_back(T / (fm.partition().size() - 1));
    res.errors.push_back(flow_error(fm, reference, T, xs));
  }
  res.order = loglog_slope(res.steps, res.errors);
  return res;
}

OrderResult order_estimate_self(const RoughDriver& drv, const std::vector<int>& refinements,
                                const TimeGrid& grid, const std::vector<Vec>& xs,
                                const SolverConfig& base) {
  check_levels(refinements);
  OrderResult res;
  const double T = grid.horizon();
  for (int n : refinements) {
    SolverConfig c = base, c2 = base;
    c.refinement = n;
    c2.refinement = 2 * n;
    FlowMap fm = solve_flow(drv, c, grid), fine = solve_flow(drv, c2, grid);
    res.steps.push_back(T / (fm.partition().size() - 1));
    res.errors.push_back(flow_error(fm, [&](const Vec& x) { return fine(0.0, T, x); }, T, xs));
  }
  res.order = loglog_slope(res.steps, res.errors);
  return res;
}

RoughDriver driver_difference(const RoughDriver& a, const RoughDriver& b) {
  RoughDriver d = a;
  d.V.max_order = std::min(a.V.max_order, b.V.max_order);
  d.W.max_order = std::min(a.W.max_order, b.W.max_order);
  auto va = a.V.eval, vb = b.V.eval, wa = a.W.eval, wb = b.W.eval;
  d.V.eval = [va, vb](double s, double t, const Vec& x, int o) { return va(s, t, x, o) - vb(s, t, x, o); };
  d.W.eval = [wa, wb](double s, double t, const Vec& x, int o) { return wa(s, t, x, o) - wb(s, t, x, o); };
  return d;
}

ContinuityResult continuity_probe(const RoughDriver& a, const RoughDriver& b, const SolverConfig& cfg,
                                  const TimeGrid& grid, const SpatialDomain& dom) {
  ContinuityResult r;
  r.driver_distance = driver_holder_norm(driver_difference(a, b), a.reg, grid, dom).value();
  FlowMap fa = solve_flow(a, cfg, grid), fb = solve_flow(b, cfg, grid);
  for (const Vec& x : dom.points())
    for (double t : grid.t) r.flow_distance = std::max(r.flow_distance, (fa(0.0, t, x) - fb(0.0, t, x)).norm());
  return r;
}

}  // namespace roughflow

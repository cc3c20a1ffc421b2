#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "roughflow/jet.hpp"
#include "roughflow/quadrature.hpp"

namespace roughflow {

struct SpatialDomain {
  int dim = 1;
  std::vector<double> lo, hi;
  std::vector<int> res;

  SpatialDomain() = default;
  SpatialDomain(int d, double lo_, double hi_, int res_);
  SpatialDomain(std::vector<double> lo_, std::vector<double> hi_, std::vector<int> res_);

  void validate() const;
  std::vector<Vec> points() const;
  double spacing(int axis) const { return (hi[axis] - lo[axis]) / (res[axis] - 1); }
};

struct TimeGrid {
  std::vector<double> t;

  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> pts);
  static TimeGrid uniform(double T, int n);

  double horizon() const { return t.back(); }
  int intervals() const { return static_cast<int>(t.size()) - 1; }
};

// v(t, x) with exact spatial derivatives up to max_order
struct SmoothVectorField {
  int dim = 1;
  int max_order = 3;
  std::function<Jet(double t, const Vec& x, int order)> eval;
  std::vector<double> breakpoints;  // times where v jumps in t
  std::vector<double> sup_bounds;   // optional sup-norm bound per derivative order

  Jet operator()(double t, const Vec& x, int order) const;
};

struct TwoTimeVectorField {
  int dim = 1;
  int max_order = 1;
  double horizon = 1.0;
  std::function<Jet(double s, double t, const Vec& x, int order)> eval;

  // returns exact zero at s == t
  Jet operator()(double s, double t, const Vec& x, int order) const;
};

struct DriverRegularity {
  double p = 2.0;
  double r = 0.9;

  double spatial() const { return 2.0 + r; }
  void validate() const;
};

struct RoughDriver {
  TwoTimeVectorField V, W;
  DriverRegularity reg;

  int dim() const { return V.dim; }
  double horizon() const { return V.horizon; }
};

double additivity_defect(const TwoTimeVectorField& V, double s, double u, double t,
                         const SpatialDomain& dom);

double chen_defect(const RoughDriver& drv, double s, double u, double t, const SpatialDomain& dom);

RoughDriver canonical_lift(const SmoothVectorField& v, const TimeGrid& grid,
                           const QuadConfig& quad = {});

struct DriverNorm {
  double v_part = 0.0;  // sup ||V_ts||_{C^{2+r}} / |t-s|^{1/p}
  double w_part = 0.0;  // sup ||W_ts||_{C^{1+r}} / |t-s|^{2/p}
  double value() const { return std::max(v_part, w_part); }
};

DriverNorm driver_holder_norm(const RoughDriver& drv, const DriverRegularity& reg,
                              const TimeGrid& grid, const SpatialDomain& dom);

// W'_ts = W_ts + X_t - X_s
using TimePath = std::function<Jet(double t, const Vec& x, int order)>;
RoughDriver perturb_second_level(const RoughDriver& drv, TimePath X, int x_order = 1);

RoughDriver zero_driver(int dim, double horizon);

// constant field in time and space
SmoothVectorField constant_field(const Vec& c);
// v(t,x) = A x
SmoothVectorField linear_field(const Mat& A);
// A x on [0, tb), B x on [tb, inf)
SmoothVectorField piecewise_linear_field(const Mat& A, const Mat& B, double tb);

}  // namespace roughflow

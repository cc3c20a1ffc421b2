#pragma once

#include <functional>
#include <string>
#include <vector>

#include "roughflow/driver.hpp"
#include "roughflow/flow.hpp"

namespace roughflow {

// scalar f on R^2 with derivatives: grad(i), hess(i,j), third[k](i,j)
struct ScalarJet {
  double value = 0.0;
  Vec grad;
  Mat hess;
  std::vector<Mat> third;
};

struct PhaseFunction {
  std::function<ScalarJet(const Vec&)> eval;
  double c3_bound = 0.0;

  double f0() const { return eval(Vec::Zero(2)).value; }
  Vec grad0() const { return eval(Vec::Zero(2)).grad; }
};

// 1 + a tanh(<k,x>)
PhaseFunction tanh_phase(double a, const Vec& k);
PhaseFunction constant_phase(double c);
// c + <g,x>; bounds are only local
PhaseFunction affine_phase(double c, const Vec& g);

// e^{i f(x) t} - e^{i f(x) s} as a 2-vector
Vec toy_first_level(const PhaseFunction& f, double s, double t, const Vec& x);
Jet toy_first_level_jet(const PhaseFunction& f, double s, double t, const Vec& x, int order);

Vec toy_second_level(const PhaseFunction& f, double s, double t, const Vec& x, const QuadConfig& quad = {});
// -(1/4)(t^2 - s^2) f(x) grad f(x)
Vec toy_second_level_main(const PhaseFunction& f, double s, double t, const Vec& x);

// v_t(x) = i f(x) e^{i f(x) t}, jets to order 3
SmoothVectorField toy_field(const PhaseFunction& f);

struct ToyDriverFamily {
  double eps = 1.0;
  PhaseFunction f;
  double T = 1.0;

  void validate() const;
};

RoughDriver rescaled_driver(const ToyDriverFamily& fam, const QuadConfig& quad = {});
RoughDriver limit_driver(const PhaseFunction& f, double T = 1.0);

// flow of the limit driver from x at time t (started at 0)
Vec limit_flow(const PhaseFunction& f, double t, const Vec& x);

struct ToyReportRow {
  double eps = 0.0;
  double v_dist = 0.0;         // sup C^1 norm of V^eps / |t-s|^gamma
  double w_dist = 0.0;         // sup C^0 distance of W^eps to the limit / |t-s|^{2 gamma}
  double flow_err = 0.0;       // endpoint distance to x0 - (1/2) T f(0) grad f(0)
  double flow_err_limit = 0.0; // endpoint distance to the limit driver's flow
  // same, after removing the first-level oscillation V^eps_{T,0}(x0), whose size depends on the phase f(0) T / eps^2
  double flow_err_corrected = 0.0;
};

struct ToyReport {
  std::vector<ToyReportRow> rows;
  double slope = 0.0;  // log-log slope of v_dist on eps
  double gamma = 0.25;
};

struct ToyReportConfig {
  double gamma = 0.25;
  double T = 1.0;
  int uniform_points = 64;
  int geometric_points = 48;
  double geometric_min = 1e-4;  // fraction of T
  Vec x0 = Vec::Zero(2);
  double step_eps2_fraction = 1.0 / 16;  // flow step <= eps^2 * this
  int min_steps = 64;
};

std::vector<double> toy_report_times(const ToyReportConfig& c);

ToyReport convergence_report(const PhaseFunction& f, const std::vector<double>& eps_list,
                             const SpatialDomain& dom, const ToyReportConfig& cfg = {});

}  // namespace roughflow

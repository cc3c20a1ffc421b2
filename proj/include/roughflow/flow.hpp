#pragma once

#include <functional>
#include <vector>

#include "roughflow/driver.hpp"

namespace roughflow {

using DriftField = std::function<Vec(const Vec&)>;

struct SolverConfig {
  int refinement = 1;         // steps per grid interval
  DriftField V0;              // optional
  double max_step = 0.0;      // <= 0 means horizon/8
  double divergence_bound = 1e8;

  void validate() const;
};

Vec local_step(const RoughDriver& drv, const DriftField& V0, double s, double t, const Vec& x,
               double divergence_bound = 1e8);

class FlowMap {
 public:
  FlowMap(RoughDriver drv, DriftField V0, std::vector<double> partition, double bound);

  // s and t must be partition points, s <= t
  Vec operator()(double s, double t, const Vec& x) const;
  // positions at every partition point from partition point s
  std::vector<Vec> path(double s, const Vec& x) const;

  const std::vector<double>& partition() const { return part_; }

 private:
  size_t index_of(double t) const;
  RoughDriver drv_;
  DriftField V0_;
  std::vector<double> part_;
  double bound_;
};

FlowMap solve_flow(const RoughDriver& drv, const SolverConfig& cfg, const TimeGrid& grid);

struct OrderResult {
  double order = 0.0;
  std::vector<double> steps, errors;
};

// reference maps x -> phi_{T,0}(x)
using FlowReference = std::function<Vec(const Vec&)>;

OrderResult order_estimate(const RoughDriver& drv, const FlowReference& reference,
                           const std::vector<int>& refinements, const TimeGrid& grid,
                           const std::vector<Vec>& xs, const SolverConfig& base = {});

// error of each level measured against the same solver at twice the refinement
OrderResult order_estimate_self(const RoughDriver& drv, const std::vector<int>& refinements,
                                const TimeGrid& grid, const std::vector<Vec>& xs,
                                const SolverConfig& base = {});

// least-squares slope of log(err) on log(step); throws IndeterminateOrder below 1e-13
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ContinuityResult {
  double driver_distance = 0.0;
  double flow_distance = 0.0;
};

RoughDriver driver_difference(const RoughDriver& a, const RoughDriver& b);

ContinuityResult continuity_probe(const RoughDriver& a, const RoughDriver& b, const SolverConfig& cfg,
                                  const TimeGrid& grid, const SpatialDomain& dom);

}  // namespace roughflow

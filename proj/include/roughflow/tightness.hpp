#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "roughflow/besov.hpp"
#include "roughflow/random_field.hpp"

namespace roughflow {

// Localized eps-drivers sampled on a square y-grid. The velocity must point along e1 so that every
// grid row is a single line of field samples; V and W then come from prefix integrals along the row.
struct TightnessSetup {
  KernelSpec spec = default_kernel(2);
  double speed = 1.0;     // v = speed * e1
  double R = 0.5;         // localization radius; V^R vanishes outside B(0, 2R)
  double dx = 0.125;      // y-grid and sigma-lattice spacing
  int sub = 6;            // row samples per dx (even)
  double s = 0.0, t = 0.25;
  TightnessParams tp;
  int batches = 4;        // seed batches for the standard errors

  void validate(double eps) const;
};

// V^{eps,R}_ts and W^{eps,R}_ts on the grid, one realization; index (row * n + col), n = 4R/dx + 1
struct DriverGrid {
  int n = 0;
  double lo = 0.0;
  std::vector<Vec> V, W;
};
DriverGrid tightness_grid(const TightnessSetup& st, double eps, uint64_t seed);

struct Summand {
  double estimate = 0.0, se = 0.0;
};

struct MomentStatistic {
  double eps = 0.0;
  std::array<Summand, 4> s;  // V moment, W moment, V difference, W difference
  int seeds = 0;
};

MomentStatistic moment_statistic(const TightnessSetup& st, double eps, const std::vector<DriverGrid>& grids);

// grids from seeds mix_seed(master, tag, i), i < seeds, evaluated in parallel and reduced in index order
MomentStatistic tightness_statistic(const TightnessSetup& st, double eps, uint64_t master, int seeds, int workers);

struct UniformityReport {
  std::array<double, 4> ratio{};  // max/min across eps
  std::array<double, 4> slope{};  // d log(summand) / d log(eps)
  bool pass = false;
};
UniformityReport uniformity(const std::vector<MomentStatistic>& stats, double max_ratio = 3.0, double max_slope = 0.3);

// random (p, r, a, d) tuples; counts accepted tuples that break one of the displayed inequalities
struct AdmissibilityAudit {
  long tested = 0, accepted = 0, false_accepts = 0;
};
AdmissibilityAudit admissibility_audit(long n, uint64_t seed);

struct DavydovResult {
  double lhs = 0.0, lhs_se = 0.0, rhs_core = 0.0, ratio = 0.0;
  double alpha = 0.0;
};

// X = F^1(0), Y = F^1(u e1) over `samples` realizations
DavydovResult davydov_check(const KernelSpec& spec, double u, double p1, double p2, double p3, uint64_t master,
                            int samples, int workers = 1);

}  // namespace roughflow

#pragma once

#include <cstdint>
#include <vector>

#include "roughflow/driver.hpp"
#include "roughflow/random_field.hpp"

namespace roughflow {

struct TurbulenceConfig {
  Vec v;                        // mean velocity
  std::vector<double> eps{0.1};
  double T = 1.0;
  int M = 200;
  double R = 1.0;               // localization radius
  double h0 = 0.02;             // micro step in units of eps^2 L/|v|
  std::vector<Vec> x0;

  void validate() const;
};

// chi^R(x) = psi(|x|/R): 1 on [0,1], 0 on [2,inf), C^3 and monotone between
struct Cutoff {
  double R = 1.0;
  double psi(double u) const;
  double dpsi(double u) const;
  double value(const double* x, int d) const;
  // value and gradient
  double eval(const double* x, int d, double* grad) const;
};

struct Path {
  std::vector<double> t;
  std::vector<Vec> x;
  double max_norm = 0.0;  // largest |x| over every field evaluation point
};

struct TrajectoryOptions {
  double micro_step = 0.0;  // <= 0: eps^2 h0 L/|v|
  double h0 = 0.02;
  int record_every = 0;     // <= 0: only endpoints
  double R = 0.0;           // > 0: right-hand side multiplied by chi^R(x)
};

// RK4 for xdot = eps^{-1} chi(x) F(x + t v / eps^2) on [0, T]
Path rescaled_trajectory(const FieldRealization& F, const Vec& v, double eps, double T, const Vec& x0,
                         const TrajectoryOptions& opt = {});

// box covering x0 + [0, T/eps^2] v, widened by margin on every side
FieldBox trajectory_box(const Vec& v, double eps, double T, const std::vector<Vec>& x0, double margin);

// V^{eps,R}, W^{eps,R} from quadrature over the fast time; V carries jets to order 1
struct LocalizedOptions {
  double R = 1.0;
  int panels_per_length = 8;  // Gauss panels per kernel radius travelled
  int nodes = 6;
};
RoughDriver localized_driver(const FieldRealization& F, const Vec& v, double eps, double T,
                             const LocalizedOptions& opt = {});

// the same pair at one (s, t, x) without the driver wrapper
struct LocalizedSample {
  Vec V, W;
  Mat DV;
};
LocalizedSample localized_driver_sample(const FieldRealization& F, const Vec& v, double eps, double s,
                                        double t, const Vec& x, const LocalizedOptions& opt = {});

// ---------------------------------------------------------------- oracles

// int_{u_lo}^{u_hi} w(u) E[D^{k1}F(0) (x) D^{k2}F(delta0 + u v)] du, exactly truncated to the support
Mat line_integral(const KernelSpec& spec, const Vec& v, const Vec& delta0, int k1, int k2, double u_lo,
                  double u_hi, double (*weight)(double) = nullptr, bool split_at_zero = false);

struct HomogenizationOracles {
  KernelSpec spec;
  Vec v;
  double u_max = 0.0;
  Mat C00;        // C(0,0)
  Vec dC;         // sum_j d_{x_j} C^{ij}(x, y) at x = y
  Vec bbar;       // one-point drift
  Vec b_sf;       // half-line antisymmetrised drift
  Mat c_sf;       // half-line antisymmetrised covariance
  Vec b1;
  Mat b2, b3, b4;

  Mat C(const Vec& x, const Vec& y) const;
  // covariance rate target stated for the one-point motion
  Mat onepoint_target() const { return C00 + C00.transpose(); }
};

// u_max <= 0 means the exact support
HomogenizationOracles compute_oracles(const KernelSpec& spec, const Vec& v, double u_max = 0.0);

// ---------------------------------------------------------------- empirical checks

struct OnePointReport {
  Vec drift, drift_se, drift_oracle;
  Mat cov_rate, cov_rate_se, cov_target, C00;
  std::vector<double> ks_p;
  bool drift_pass = false, cov_pass = false, cov_pass_C00 = false, ks_pass = false;
};

// increments x_T - x0 from M independent realizations
OnePointReport empirical_onepoint(const std::vector<Vec>& increments, double T, const HomogenizationOracles& o,
                                  double nsigma = 3.0);

struct TwoPointReport {
  Mat cross_rate, cross_se, oracle;
  bool pass = false;
};

TwoPointReport empirical_twopoint(const std::vector<Vec>& inc_x, const std::vector<Vec>& inc_y, double T,
                                  const Mat& oracle, double nsigma = 3.0);

// ---------------------------------------------------------------- skeleton

// (F, DF, D^2F) at one point: a2 = jacobian, a3[k](i,j) = d_j d_k F^i
struct Graded {
  Vec a1;
  Mat a2;
  std::vector<Mat> a3;

  static Graded zero(int d);
  Graded& operator+=(const Graded& o);
  Graded scaled(double s) const;
};

struct StarTuple {
  Vec s1;    // a^2 b^1
  Mat s2;    // a^1 (x) b^1
  Mat s3;    // a^3 b^1
  Mat s4;    // a^2 b^2 (matrix product)

  static StarTuple zero(int d);
  StarTuple& operator+=(const StarTuple& o);
  StarTuple operator-(const StarTuple& o) const;
  StarTuple scaled(double s) const;
  double norm() const;
  double norm_first() const { return s1.norm(); }
};

StarTuple star_product(const Graded& a, const Graded& b);

// int_0^1 (1 - u) E[F_0 star F_{-u}] du: expected ordered double integral over one unit block
StarTuple ordered_expectation(const KernelSpec& spec, const Vec& v);

// running integrals I(tau) = int_0^tau F_u du and S(tau) = int int_{u2<u1<=tau} F_{u1} star F_{u2}
// at the requested (sorted) times, with F_u = (F, DF, D^2F)(x + u v)
struct Progressive {
  std::vector<double> tau;
  std::vector<Graded> I;
  std::vector<StarTuple> S;
};
Progressive progressive_levels(const FieldRealization& F, const Vec& v, const Vec& x,
                               const std::vector<double>& taus, double panel = 1.0 / 32, int nodes = 6);

struct SkeletonResidual {
  double total = 0.0;  // |R^n_t| over all four components
  double first = 0.0;  // first-level gap between the continuous and block sums
};

SkeletonResidual skeleton_residual(const FieldRealization& F, const Vec& v, const Vec& x, double t, int n,
                                   const StarTuple& E_ordered, double panel = 1.0 / 32);

struct FamilyGap {
  double first = 0.0, second = 0.0;
  int n = 0;
};

// n = floor(eps^-2) (robust to rounding at exact reciprocal squares)
int sequence_index(double eps);
FamilyGap family_vs_sequence(const FieldRealization& F, const Vec& v, const Vec& x, double t, double eps,
                             double panel = 1.0 / 32);

// ---------------------------------------------------------------- localization removal

struct LocalizationSample {
  std::vector<bool> nonexit;        // per radius
  std::vector<double> distance;     // sup distance between consecutive radii (size R-1)
};

// trajectories of the chi^R-localized equation from every x0 in K, one realization
LocalizationSample localization_sample(const FieldRealization& F, const Vec& v, double eps, double T,
                                       const std::vector<Vec>& K, const std::vector<double>& radii,
                                       int record_every = 50);

struct LocalizationTable {
  std::vector<double> radii;
  std::vector<double> nonexit_fraction;
  std::vector<double> median_distance, max_distance;
  bool zero_on_nonexit = true;  // every non-exiting realization had distance exactly 0
  bool monotone = true;
};

LocalizationTable localization_table(const std::vector<LocalizationSample>& samples, const std::vector<double>& radii);

}  // namespace roughflow

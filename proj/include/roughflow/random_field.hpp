#pragma once

#include <cstdint>
#include <vector>

#include "roughflow/jet.hpp"
#include "roughflow/philox.hpp"

namespace roughflow {

// F^a(x) = A sum_c M_ac sum_z phi(x - o_ac - z h - shift) xi^c_z,  phi(y) = (1 - |y|^2/L^2)^4_+
struct KernelSpec {
  int d = 2;
  double L = 1.0;
  double amplitude = 1.0;
  double h = 0.25;
  Mat mixing;                // d x d; empty means identity
  std::vector<Vec> offsets;  // d*d entries o_{ac} at a*d + c; empty means zero
  bool random_shift = true;  // uniform lattice shift per realization

  void validate() const;
  Mat M() const;
  Vec offset(int a, int c) const;
  double max_offset() const;
  // F and F' independent beyond this distance
  double range() const { return 2.0 * L + 2.0 * max_offset(); }
};

KernelSpec default_kernel(int d = 2);
// non-identity mixing with per-channel offsets; breaks reflection symmetry
KernelSpec anisotropic_kernel(int d = 2);

// phi and derivatives at y; out arrays sized for d <= 3
struct BumpJet {
  double v;
  double g[3];
  double h[3][3];
  double t[3][3][3];
};
// returns false when |y| >= L (all derivatives vanish)
bool bump_jet(const double* y, int d, double L, int order, BumpJet& out);

// raw field jet, d <= 3: j[a][i] = d_i F^a, h[a][i][k], t[a][i][k][l]
struct FieldJet {
  int d = 0, order = 0;
  double v[3];
  double j[3][3];
  double h[3][3][3];
  double t[3][3][3][3];
  void clear(int d_, int order_);
  Jet to_jet() const;
};

struct FieldBox {
  std::vector<double> lo, hi;  // evaluation region
};

class FieldRealization {
 public:
  FieldRealization(const KernelSpec& spec, uint64_t seed, const FieldBox& box);

  void eval(const double* x, int order, FieldJet& out) const;
  Jet jet(const Vec& x, int order) const;
  Vec value(const Vec& x) const;

  const KernelSpec& spec() const { return spec_; }
  const FieldBox& box() const { return box_; }
  uint64_t seed() const { return seed_; }
  const std::vector<double>& shift() const { return shift_; }
  bool covers(const double* x) const;
  double noise(const int* site, int c) const;

 private:
  struct Group {
    std::vector<double> o;                 // offset
    std::vector<std::pair<int, int>> ac;   // (output a, channel c)
  };
  KernelSpec spec_;
  uint64_t seed_;
  FieldBox box_;
  std::vector<double> shift_;
  std::vector<int> imin_, n_;  // lattice window
  std::vector<double> xi_;     // site-major, channel-minor
  std::vector<Group> groups_;
  Mat M_;
  bool zero_;
};

FieldRealization synthesize(const KernelSpec& spec, uint64_t seed, const FieldBox& box);

// E[D^{k1}F(x) (x) D^{k2}F(x+delta)], cell-averaged. Rows a*d^k1 + multi-index, cols b*d^k2 + multi-index.
Mat covariance_oracle(const KernelSpec& spec, const Vec& delta, int k1, int k2);

// int phi(y) phi(y + delta) dy for the bump alone (no amplitude or lattice factor)
double bump_autocorrelation(const KernelSpec& spec, const Vec& delta);

struct MixingProfile {
  double range = 0.0;  // alpha(u) = 0 for u > range
  double kappa = 0.1;
  double a0 = 8.0;
  double alpha(double u) const { return u > range ? 0.0 : 0.25; }
  // int_0^inf alpha^kappa du
  double alpha_integral() const;
};

// admissible kappa interval (0, min(1/3, 1/d) - 1/a0)
double kappa_upper(int d, double a0);
// throws ConstraintError when a0 <= max(3,d) or kappa is outside the interval
MixingProfile mixing_profile(const KernelSpec& spec, double kappa, double a0);

}  // namespace roughflow

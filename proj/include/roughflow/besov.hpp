#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "roughflow/driver.hpp"

namespace roughflow {

using PointField = std::function<Vec(const Vec&)>;
using JetField = std::function<Jet(const Vec&, int order)>;

// Delta_sigma^m f; when `box` is given, evaluation outside it is a coverage error
PointField finite_difference(PointField f, Vec sigma, int m,
                             std::optional<SpatialDomain> box = std::nullopt);

struct BesovParams {
  double alpha = 1.0;
  double a = 2.0, b = 2.0;  // infinity allowed
  int m = 1;

  void validate() const;
};

struct BesovQuad {
  int radial = 24;      // log-spaced radii in [rho_min, 1]
  int angular = 24;     // directions (d=2: full circle; d=3: per polar band)
  double rho_min = 1e-3;
  double tolerance = 0.25;  // relative change allowed when radial count is halved
};

// ||f||_{L^a} + (int_{B(0,1)} |s|^{-b alpha} ||Delta^m_s f||_{L^a}^b ds/|s|^d)^{1/b}
// f must vanish outside dom; the L^a integrals run over dom dilated by m.
double besov_norm(const PointField& f, const BesovParams& p, const SpatialDomain& dom,
                  const BesovQuad& q = {});

// sigma quadrature nodes (direction * radius) with weights for int_{B(0,1)} g(s) ds/|s|^d,
// integrated in log-radius; tail below rho_min is not included
struct SigmaNode {
  Vec sigma;
  double weight;
};
std::vector<SigmaNode> sigma_nodes(int d, int radial, int angular, double rho_min);

struct HolderNorm {
  std::vector<double> sup;  // sup |D^k f| for k <= floor(alpha)
  double seminorm = 0.0;    // discrete Holder quotient of D^{floor(alpha)} f
  double total() const;
};

HolderNorm holder_space_norm(const JetField& f, double alpha, const SpatialDomain& dom);

struct TightnessParams {
  double p = 2.0, r = 0.9, a = 6.0;
  int k1 = 3;
  int d = 2;

  // throws ConstraintError naming the first violated inequality
  void validate() const;
  bool admissible() const;
  // a point strictly inside the admissible (p', r') region
  double p_prime() const;
  double r_prime() const;
};

// a = a0 / (a0 kappa + 1)
double tightness_exponent(double a0, double kappa);

}  // namespace roughflow

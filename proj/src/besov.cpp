#include "roughflow/besov.hpp"

#include <cmath>
#include <numbers>

#include "roughflow/errors.hpp"

namespace roughflow {

namespace {

double binom(int m, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (m - k + i) / i;
  return r;
}

bool inside(const SpatialDomain& box, const Vec& x) {
  for (int a = 0; a < box.dim; ++a)
    if (x(a) < box.lo[a] - 1e-12 || x(a) > box.hi[a] + 1e-12) return false;
  return true;
}

Jet diff_jet(const Jet& a, const Jet& b, int k) {
  Jet r = a.truncated(k);
  r.axpy(-1.0, b);
  return r;
}

double norm_of_order(const Jet& j, int k) { return derivative_norm(j, k); }

}  // namespace

PointField finite_difference(PointField f, Vec sigma, int m, std::optional<SpatialDomain> box) {
  if (m < 1) throw ArgumentError("difference order must be >= 1");
  return [f, sigma, m, box](const Vec& x) {
    Vec acc;
    for (int k = 0; k <= m; ++k) {
      Vec y = x + k * sigma;
      if (box && !inside(*box, y))
        throw CoverageError("finite difference evaluates outside the sampled domain", k * sigma.norm());
      Vec fy = f(y);
      const double c = ((m - k) % 2 ? -1.0 : 1.0) * binom(m, k);
      if (k == 0)
        acc = c * fy;
      else
        acc += c * fy;
    }
    return acc;
  };
}

void BesovParams::validate() const {
  if (!(alpha > 0)) throw ArgumentError("besov alpha must be positive");
  if (m < 1 || m < alpha) throw ArgumentError("besov difference order must satisfy m >= alpha, m >= 1");
  if (!(a >= 1) || !(b >= 1)) throw ArgumentError("besov integrabilities must be >= 1");
}

std::vector<SigmaNode> sigma_nodes(int d, int radial, int angular, double rho_min) {
  const GaussRule& gr = gauss_legendre(radial);
  const double lo = std::log(rho_min), c = 0.5 * lo, h = -0.5 * lo;
  std::vector<std::pair<Vec, double>> dirs;
  if (d == 1) {
    dirs.push_back({Vec::Constant(1, 1.0), 1.0});
    dirs.push_back({Vec::Constant(1, -1.0), 1.0});
  } else if (d == 2) {
    for (int k = 0; k < angular; ++k) {
      const double th = 2.0 * std::numbers::pi * k / angular;
      Vec e(2);
      e << std::cos(th), std::sin(th);
      dirs.push_back({e, 2.0 * std::numbers::pi / angular});
    }
  } else if (d == 3) {
    const GaussRule& gc = gauss_legendre(std::max(2, angular / 2));
    for (size_t i = 0; i < gc.x.size(); ++i)
      for (int k = 0; k < angular; ++k) {
        const double ph = 2.0 * std::numbers::pi * k / angular, ct = gc.x[i], st = std::sqrt(1 - ct * ct);
        Vec e(3);
        e << st * std::cos(ph), st * std::sin(ph), ct;
        dirs.push_back({e, gc.w[i] * 2.0 * std::numbers::pi / angular});
      }
  } else {
    throw ArgumentError("sigma quadrature supports d <= 3");
  }
  std::vector<SigmaNode> out;
  for (const auto& [e, wd] : dirs)
    for (size_t i = 0; i < gr.x.size(); ++i) {
      const double rho = std::exp(c + h * gr.x[i]);
      out.push_back({rho * e, wd * h * gr.w[i]});
    }
  return out;
}

static double besov_once(const PointField& f, const BesovParams& p, const SpatialDomain& dom,
                         const BesovQuad& q, int radial) {
  const int d = dom.dim;
  // dilated grid with the same spacing
  std::vector<double> lo(d), hi(d);
  std::vector<int> res(d);
  double cell = 1.0;
  for (int a = 0; a < d; ++a) {
    const double h = dom.spacing(a);
    const int ext = static_cast<int>(std::ceil(p.m / h));
    lo[a] = dom.lo[a] - ext * h;
    hi[a] = dom.hi[a] + ext * h;
    res[a] = dom.res[a] + 2 * ext;
    cell *= h;
  }
  const SpatialDomain big(lo, hi, res);
  const auto pts = big.points();
  const bool ainf = std::isinf(p.a), binf = std::isinf(p.b);

  auto la_norm = [&](const PointField& g) {
    double acc = 0.0;
    for (const Vec& x : pts) {
      const double v = g(x).norm();
      if (ainf)
        acc = std::max(acc, v);
      else if (v > 0)
        acc += std::pow(v, p.a) * cell;
    }
    return ainf ? acc : std::pow(acc, 1.0 / p.a);
  };

  const double base = la_norm(f);
  const auto nodes = sigma_nodes(d, radial, q.angular, q.rho_min);
  double integral = 0.0, supq = 0.0;
  // smallest radius of each direction drives the power-law tail below rho_min
  const double tail_pow = p.m - p.alpha;
  for (size_t i = 0; i < nodes.size(); ++i) {
    const double rho = nodes[i].sigma.norm();
    const double nd = la_norm(finite_difference(f, nodes[i].sigma, p.m));
    const double qv = nd / std::pow(rho, p.alpha);
    if (binf) {
      supq = std::max(supq, qv);
      continue;
    }
    integral += nodes[i].weight * std::pow(qv, p.b);
    if (i % radial == 0 && tail_pow > 0) {
      const double c = nd / std::pow(rho, p.m);
      const double dir_w = nodes[i].weight / (0.5 * -std::log(q.rho_min) * gauss_legendre(radial).w[0]);
      integral += dir_w * std::pow(c, p.b) * std::pow(q.rho_min, p.b * tail_pow) / (p.b * tail_pow);
    }
  }
  const double semi = binf ? supq : std::pow(integral, 1.0 / p.b);
  return base + semi;
}

double besov_norm(const PointField& f, const BesovParams& p, const SpatialDomain& dom, const BesovQuad& q) {
  p.validate();
  const double full = besov_once(f, p, dom, q, q.radial);
  const double half = besov_once(f, p, dom, q, std::max(2, q.radial / 2));
  const double scale = std::max(std::abs(full), 1e-300);
  if (full > 0 && std::abs(full - half) / scale > q.tolerance)
    throw ToleranceError("besov sigma-integral does not settle under radial refinement");
  return full;
}

double HolderNorm::total() const {
  double s = seminorm;
  for (double v : sup) s += v;
  return s;
}

HolderNorm holder_space_norm(const JetField& f, double alpha, const SpatialDomain& dom) {
  if (!(alpha > 0 && alpha < 3)) throw ArgumentError("holder exponent must lie in (0,3)");
  if (std::abs(alpha - std::round(alpha)) < 1e-12) throw ArgumentError("holder exponent must be non-integer");
  const int k = static_cast<int>(std::floor(alpha));
  const double frac = alpha - k;
  const auto pts = dom.points();
  std::vector<Jet> jets;
  jets.reserve(pts.size());
  for (const Vec& x : pts) jets.push_back(f(x, k));
  HolderNorm n;
  n.sup.assign(k + 1, 0.0);
  for (const Jet& j : jets)
    for (int o = 0; o <= k; ++o) n.sup[o] = std::max(n.sup[o], norm_of_order(j, o));
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      const double dist = (pts[i] - pts[j]).norm();
      const double num = norm_of_order(diff_jet(jets[i], jets[j], k), k);
      n.seminorm = std::max(n.seminorm, num / std::pow(dist, frac));
    }
  return n;
}

void TightnessParams::validate() const {
  if (!(p > 0 && std::isfinite(p) && r > 0 && r < 1 && a > 0 && std::isfinite(a)))
    throw ConstraintError("0 < p, 0 < r < 1, 0 < a", "tightness exponents must be positive finite with r < 1");
  if (k1 < 3) throw ConstraintError("k1 >= 3", "difference order k1 must be >= 3");
  const double inv = 1.0 / p - 1.0 / (2.0 * a);
  if (!(inv > 0)) throw ConstraintError("1/p - 1/(2a) > 0", "tightness exponents violate 1/p - 1/(2a) > 0");
  const double x = 1.0 / inv - 2.0;
  if (!(0 < x))
    throw ConstraintError("0 < 1/(1/p - 1/(2a)) - 2", "tightness exponents violate 0 < 1/(1/p - 1/(2a)) - 2");
  if (!(x < r - d / a))
    throw ConstraintError("1/(1/p - 1/(2a)) - 2 < r - d/a",
                          "tightness exponents violate 1/(1/p - 1/(2a)) - 2 < r - d/a");
}

bool TightnessParams::admissible() const {
  try {
    validate();
    return true;
  } catch (const ConstraintError&) {
    return false;
  }
}

double TightnessParams::r_prime() const {
  validate();
  const double x = 1.0 / (1.0 / p - 1.0 / (2.0 * a)) - 2.0;
  return 0.5 * (x + (r - d / a));
}

double TightnessParams::p_prime() const {
  const double lo = 1.0 / (1.0 / p - 1.0 / (2.0 * a));
  return 0.5 * (lo + 2.0 + r_prime());
}

double tightness_exponent(double a0, double kappa) { return a0 / (a0 * kappa + 1.0); }

}  // namespace roughflow

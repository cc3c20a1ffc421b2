#include "roughflow/random_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "roughflow/errors.hpp"
#include "roughflow/quadrature.hpp"

namespace roughflow {

void KernelSpec::validate() const {
  if (d < 1 || d > 3) throw ArgumentError("random field dimension must be 1, 2 or 3");
  if (!(L > 0)) throw ArgumentError("kernel radius L must be positive");
  if (!(h > 0) || h > L / 4 + 1e-15) throw ConstraintError("h <= L/4", "lattice spacing must satisfy h <= L/4");
  if (!std::isfinite(amplitude)) throw ArgumentError("kernel amplitude must be finite");
  if (mixing.size() && (mixing.rows() != d || mixing.cols() != d))
    throw ArgumentError("mixing matrix must be d x d");
  if (!offsets.empty()) {
    if (static_cast<int>(offsets.size()) != d * d) throw ArgumentError("offsets need d*d entries");
    for (const auto& o : offsets)
      if (o.size() != d) throw ArgumentError("offset vectors must have length d");
  }
}

Mat KernelSpec::M() const { return mixing.size() ? mixing : Mat::Identity(d, d); }

Vec KernelSpec::offset(int a, int c) const {
  return offsets.empty() ? Vec::Zero(d) : offsets[a * d + c];
}

double KernelSpec::max_offset() const {
  double m = 0;
  for (const auto& o : offsets) m = std::max(m, o.norm());
  return m;
}

KernelSpec default_kernel(int d) {
  KernelSpec k;
  k.d = d;
  k.L = 1.0;
  k.h = 0.25;
  k.amplitude = 0.25;
  return k;
}

KernelSpec anisotropic_kernel(int d) {
  KernelSpec k = default_kernel(d);
  Mat M = Mat::Identity(d, d);
  for (int a = 0; a < d; ++a)
    for (int c = 0; c < d; ++c)
      if (a != c) M(a, c) = (a < c ? 0.5 : -0.3);
  k.mixing = M;
  for (int a = 0; a < d; ++a)
    for (int c = 0; c < d; ++c) {
      Vec o = Vec::Zero(d);
      if (a != c) {
        o(0) = 0.3 * (a - c);
        if (d > 1) o(1) = 0.15;
      }
      k.offsets.push_back(o);
    }
  return k;
}

bool bump_jet(const double* y, int d, double L, int order, BumpJet& out) {
  const double il2 = 1.0 / (L * L);
  double rho = 0;
  for (int i = 0; i < d; ++i) rho += y[i] * y[i];
  rho *= il2;
  if (rho >= 1.0) return false;
  const double w = 1.0 - rho, w2 = w * w;
  out.v = w2 * w2;
  if (order < 1) return true;
  const double q1 = -4 * w2 * w, q2 = 12 * w2, q3 = -24 * w;
  for (int i = 0; i < d; ++i) out.g[i] = q1 * 2 * y[i] * il2;
  if (order < 2) return true;
  const double il4 = il2 * il2;
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) out.h[i][k] = q2 * 4 * y[i] * y[k] * il4 + (i == k ? q1 * 2 * il2 : 0.0);
  if (order < 3) return true;
  const double il6 = il4 * il2;
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) {
        double s = q3 * 8 * y[i] * y[k] * y[l] * il6;
        double t = 0;
        if (i == k) t += y[l];
        if (i == l) t += y[k];
        if (k == l) t += y[i];
        out.t[i][k][l] = s + q2 * 4 * t * il4;
      }
  return true;
}

void FieldJet::clear(int d_, int order_) {
  d = d_;
  order = order_;
  for (int a = 0; a < 3; ++a) {
    v[a] = 0;
    for (int i = 0; i < 3; ++i) {
      j[a][i] = 0;
      for (int k = 0; k < 3; ++k) {
        h[a][i][k] = 0;
        for (int l = 0; l < 3; ++l) t[a][i][k][l] = 0;
      }
    }
  }
}

Jet FieldJet::to_jet() const {
  Jet J(d, order);
  for (int a = 0; a < d; ++a) {
    J.value(a) = v[a];
    if (order >= 1)
      for (int i = 0; i < d; ++i) J.jac(a, i) = j[a][i];
    if (order >= 2)
      for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i) J.hess[k](a, i) = h[a][i][k];
    if (order >= 3)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          for (int i = 0; i < d; ++i) J.third[k][l](a, i) = t[a][i][k][l];
  }
  return J;
}

namespace {
constexpr uint32_t kShiftWord = 0xFFFFFFFFu;
inline uint32_t as_word(int z) { return static_cast<uint32_t>(z); }
}  // namespace

FieldRealization::FieldRealization(const KernelSpec& spec, uint64_t seed, const FieldBox& box)
    : spec_(spec), seed_(seed), box_(box) {
  spec_.validate();
  const int d = spec_.d;
  if (static_cast<int>(box.lo.size()) != d || static_cast<int>(box.hi.size()) != d)
    throw ArgumentError("field box must have d axes");
  for (int i = 0; i < d; ++i)
    if (!(box.lo[i] <= box.hi[i])) throw ArgumentError("field box is degenerate");
  M_ = spec_.M();
  zero_ = spec_.amplitude == 0.0 || M_.isZero(0.0);

  const CounterRng rng(seed);
  shift_.assign(d, 0.0);
  if (spec_.random_shift)
    for (int i = 0; i < d; ++i) shift_[i] = spec_.h * rng.uniform(kShiftWord, as_word(i), kShiftWord, kShiftWord - 1);

  // group (a,c) pairs by offset so each site is visited once per distinct offset
  for (int a = 0; a < d; ++a)
    for (int c = 0; c < d; ++c) {
      if (M_(a, c) == 0.0) continue;
      const Vec o = spec_.offset(a, c);
      auto it = std::find_if(groups_.begin(), groups_.end(), [&](const Group& g) {
        for (int i = 0; i < d; ++i)
          if (g.o[i] != o(i)) return false;
        return true;
      });
      if (it == groups_.end()) {
        groups_.push_back(Group{std::vector<double>(o.data(), o.data() + d), {}});
        it = groups_.end() - 1;
      }
      it->ac.emplace_back(a, c);
    }

  const double reach = spec_.L + spec_.max_offset();
  imin_.assign(d, 0);
  n_.assign(d, 1);
  size_t total = 1;
  for (int i = 0; i < d; ++i) {
    imin_[i] = static_cast<int>(std::floor((box.lo[i] - reach - shift_[i]) / spec_.h)) - 1;
    const int imax = static_cast<int>(std::ceil((box.hi[i] + reach - shift_[i]) / spec_.h)) + 1;
    n_[i] = imax - imin_[i] + 1;
    total *= static_cast<size_t>(n_[i]);
  }
  if (zero_) return;
  if (total * d > (size_t{1} << 28)) throw ArgumentError("field box needs too many lattice sites");
  xi_.resize(total * d);
  int z[3] = {0, 0, 0};
  for (size_t s = 0; s < total; ++s) {
    size_t r = s;
    for (int i = d - 1; i >= 0; --i) {
      z[i] = imin_[i] + static_cast<int>(r % n_[i]);
      r /= n_[i];
    }
    for (int c = 0; c < d; ++c) xi_[s * d + c] = rng.normal(as_word(c), as_word(z[0]), as_word(z[1]), as_word(z[2]));
  }
}

double FieldRealization::noise(const int* site, int c) const {
  const CounterRng rng(seed_);
  int z[3] = {0, 0, 0};
  for (int i = 0; i < spec_.d; ++i) z[i] = site[i];
  return rng.normal(as_word(c), as_word(z[0]), as_word(z[1]), as_word(z[2]));
}

bool FieldRealization::covers(const double* x) const {
  for (int i = 0; i < spec_.d; ++i)
    if (!(x[i] >= box_.lo[i] && x[i] <= box_.hi[i])) return false;
  return true;
}

void FieldRealization::eval(const double* x, int order, FieldJet& out) const {
  const int d = spec_.d;
  if (order < 0 || order > 3) throw CapabilityError("field jets are available to order 3");
  out.clear(d, order);
  if (!covers(x)) {
    double m = 0;
    for (int i = 0; i < d; ++i) m = std::max({m, box_.lo[i] - x[i], x[i] - box_.hi[i]});
    throw CoverageError("field evaluated outside its box; widen by " + std::to_string(m), m);
  }
  if (zero_) return;
  const double L = spec_.L, h = spec_.h, A = spec_.amplitude;
  BumpJet b;
  double y[3] = {0, 0, 0};
  int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
  for (const Group& g : groups_) {
    for (int i = 0; i < d; ++i) {
      const double c = x[i] - g.o[i] - shift_[i];
      lo[i] = static_cast<int>(std::ceil((c - L) / h));
      hi[i] = static_cast<int>(std::floor((c + L) / h));
    }
    int z[3];
    for (z[0] = lo[0]; z[0] <= hi[0]; ++z[0])
      for (z[1] = (d > 1 ? lo[1] : 0); z[1] <= (d > 1 ? hi[1] : 0); ++z[1])
        for (z[2] = (d > 2 ? lo[2] : 0); z[2] <= (d > 2 ? hi[2] : 0); ++z[2]) {
          size_t s = 0;
          for (int i = 0; i < d; ++i) {
            y[i] = x[i] - g.o[i] - shift_[i] - z[i] * h;
            s = s * n_[i] + static_cast<size_t>(z[i] - imin_[i]);
          }
          if (!bump_jet(y, d, L, order, b)) continue;
          const double* xi = &xi_[s * d];
          double coef[3] = {0, 0, 0};
          for (const auto& [a, c] : g.ac) coef[a] += A * M_(a, c) * xi[c];
          for (int a = 0; a < d; ++a) {
            const double q = coef[a];
            if (q == 0.0) continue;
            out.v[a] += q * b.v;
            if (order < 1) continue;
            for (int i = 0; i < d; ++i) {
              out.j[a][i] += q * b.g[i];
              if (order < 2) continue;
              for (int k = 0; k < d; ++k) {
                out.h[a][i][k] += q * b.h[i][k];
                if (order < 3) continue;
                for (int l = 0; l < d; ++l) out.t[a][i][k][l] += q * b.t[i][k][l];
              }
            }
          }
        }
  }
}

Jet FieldRealization::jet(const Vec& x, int order) const {
  FieldJet f;
  eval(x.data(), order, f);
  return f.to_jet();
}

Vec FieldRealization::value(const Vec& x) const {
  FieldJet f;
  eval(x.data(), 0, f);
  Vec v(spec_.d);
  for (int a = 0; a < spec_.d; ++a) v(a) = f.v[a];
  return v;
}

FieldRealization synthesize(const KernelSpec& spec, uint64_t seed, const FieldBox& box) {
  return FieldRealization(spec, seed, box);
}

namespace {

int ipow(int d, int k) {
  int r = 1;
  for (int i = 0; i < k; ++i) r *= d;
  return r;
}

// flattened D^k phi(y), multi-index in row-major order
void bump_tensor(const BumpJet& b, int d, int k, double* out) {
  switch (k) {
    case 0: out[0] = b.v; break;
    case 1:
      for (int i = 0; i < d; ++i) out[i] = b.g[i];
      break;
    case 2:
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out[i * d + j] = b.h[i][j];
      break;
    default:
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          for (int l = 0; l < d; ++l) out[(i * d + j) * d + l] = b.t[i][j][l];
  }
}

// orthonormal frame with e[0] along delta (arbitrary when delta = 0)
void frame(const Vec& delta, int d, double e[3][3]) {
  const double n = delta.norm();
  double u[3] = {1, 0, 0};
  if (n > 0)
    for (int i = 0; i < d; ++i) u[i] = delta(i) / n;
  for (int i = 0; i < 3; ++i) e[0][i] = i < d ? u[i] : 0.0;
  if (d == 2) {
    e[1][0] = -e[0][1];
    e[1][1] = e[0][0];
  } else if (d == 3) {
    // Gram-Schmidt against the least-aligned axis
    int ax = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(e[0][i]) < std::abs(e[0][ax])) ax = i;
    double v[3] = {0, 0, 0};
    v[ax] = 1;
    const double p = e[0][ax];
    double nn = 0;
    for (int i = 0; i < 3; ++i) {
      v[i] -= p * e[0][i];
      nn += v[i] * v[i];
    }
    nn = std::sqrt(nn);
    for (int i = 0; i < 3; ++i) e[1][i] = v[i] / nn;
    e[2][0] = e[0][1] * e[1][2] - e[0][2] * e[1][1];
    e[2][1] = e[0][2] * e[1][0] - e[0][0] * e[1][2];
    e[2][2] = e[0][0] * e[1][1] - e[0][1] * e[1][0];
  }
}

// integral over the lens |y| < L, |y + D| < L of f(y), f receiving y and weight
template <class F>
void lens_quadrature(const Vec& D, double L, F&& f) {
  const int d = static_cast<int>(D.size());
  const double dn = D.norm();
  if (dn >= 2 * L) return;
  double e[3][3];
  frame(D, d, e);  // second ball centre -D sits at z = -|D|
  const GaussRule& gphi = gauss_legendre(48);
  const GaussRule& gw = gauss_legendre(9);
  const double pi = std::numbers::pi;
  const double split = std::asin(std::min(1.0, dn / (2 * L)));
  auto slab = [&](double z, double W, double wz) {
    double y[3];
    if (d == 1) {
      y[0] = z * e[0][0];
      f(y, wz);
      return;
    }
    if (d == 2) {
      gauss_panel(gw, -W, W, [&](double w, double ww) {
        for (int i = 0; i < 2; ++i) y[i] = z * e[0][i] + w * e[1][i];
        f(y, wz * ww);
      });
      return;
    }
    const int nth = 18;
    gauss_panel(gw, 0.0, W, [&](double r, double wr) {
      for (int m = 0; m < nth; ++m) {
        const double th = 2 * pi * m / nth, c = r * std::cos(th), s = r * std::sin(th);
        for (int i = 0; i < 3; ++i) y[i] = z * e[0][i] + c * e[1][i] + s * e[2][i];
        f(y, wz * wr * r * 2 * pi / nth);
      }
    });
  };
  if (d == 1) {
    // 1D: integrand polynomial on [-L, L - |D|]
    gauss_panel(gauss_legendre(12), -L, -dn / 2, [&](double z, double w) { slab(z, 0, w); });
    gauss_panel(gauss_legendre(12), -dn / 2, L - dn, [&](double z, double w) { slab(z, 0, w); });
    return;
  }
  // piece A: z + |D| = L sin(phi), the second ball binds
  gauss_panel(gphi, split, pi / 2, [&](double phi, double w) {
    const double c = std::cos(phi);
    slab(L * std::sin(phi) - dn, L * c, w * L * c);
  });
  // piece B: z = L sin(phi), the first ball binds
  gauss_panel(gphi, -pi / 2, -split, [&](double phi, double w) {
    const double c = std::cos(phi);
    slab(L * std::sin(phi), L * c, w * L * c);
  });
}

}  // namespace

Mat covariance_oracle(const KernelSpec& spec, const Vec& delta, int k1, int k2) {
  spec.validate();
  if (k1 < 0 || k2 < 0 || k1 > 3 || k2 > 3) throw CapabilityError("covariance oracle supports derivative orders up to 3");
  const int d = spec.d;
  if (delta.size() != d) throw ArgumentError("displacement must have length d");
  const int n1 = ipow(d, k1), n2 = ipow(d, k2);
  Mat out = Mat::Zero(d * n1, d * n2);
  const Mat M = spec.M();
  const double scale = spec.amplitude * spec.amplitude / std::pow(spec.h, d);
  if (scale == 0.0) return out;
  double t1[27], t2[27];
  for (int c = 0; c < d; ++c)
    for (int a = 0; a < d; ++a) {
      if (M(a, c) == 0.0) continue;
      for (int b = 0; b < d; ++b) {
        if (M(b, c) == 0.0) continue;
        const Vec D = delta + spec.offset(a, c) - spec.offset(b, c);
        Mat acc = Mat::Zero(n1, n2);
        lens_quadrature(D, spec.L, [&](const double* y, double w) {
          BumpJet b1, b2;
          double y2[3];
          for (int i = 0; i < d; ++i) y2[i] = y[i] + D(i);
          if (!bump_jet(y, d, spec.L, k1, b1) || !bump_jet(y2, d, spec.L, k2, b2)) return;
          bump_tensor(b1, d, k1, t1);
          bump_tensor(b2, d, k2, t2);
          for (int p = 0; p < n1; ++p)
            for (int q = 0; q < n2; ++q) acc(p, q) += w * t1[p] * t2[q];
        });
        out.block(a * n1, b * n2, n1, n2) += scale * M(a, c) * M(b, c) * acc;
      }
    }
  return out;
}

double bump_autocorrelation(const KernelSpec& spec, const Vec& delta) {
  double acc = 0;
  lens_quadrature(delta, spec.L, [&](const double* y, double w) {
    BumpJet b1, b2;
    double y2[3];
    for (int i = 0; i < spec.d; ++i) y2[i] = y[i] + delta(i);
    if (bump_jet(y, spec.d, spec.L, 0, b1) && bump_jet(y2, spec.d, spec.L, 0, b2)) acc += w * b1.v * b2.v;
  });
  return acc;
}

double MixingProfile::alpha_integral() const { return range * std::pow(0.25, kappa); }

double kappa_upper(int d, double a0) { return std::min(1.0 / 3.0, 1.0 / d) - 1.0 / a0; }

MixingProfile mixing_profile(const KernelSpec& spec, double kappa, double a0) {
  spec.validate();
  if (!(a0 > std::max(3, spec.d)))
    throw ConstraintError("a0 > max(3, d)", "moment exponent a0 must exceed max(3, d)");
  const double up = kappa_upper(spec.d, a0);
  if (!(kappa > 0 && kappa < up))
    throw ConstraintError("0 < kappa < min(1/3, 1/d) - 1/a0",
                          "kappa = " + std::to_string(kappa) + " outside (0, " + std::to_string(up) + ")");
  MixingProfile m;
  m.range = spec.range();
  m.kappa = kappa;
  m.a0 = a0;
  return m;
}

}  // namespace roughflow

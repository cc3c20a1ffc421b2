#include <doctest.h>

#include <cmath>
#include <numbers>

#include "roughflow/errors.hpp"
#include "roughflow/philox.hpp"
#include "roughflow/random_field.hpp"

using namespace roughflow;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

FieldBox box2(double half) { return FieldBox{{-half, -half}, {half, half}}; }

// F^a(x) summed site by site from the stored noise and shift
Vec explicit_field(const FieldRealization& f, const Vec& x) {
  const KernelSpec& k = f.spec();
  const Mat M = k.M();
  Vec out = Vec::Zero(2);
  const int zr = static_cast<int>(std::ceil((k.L + k.max_offset() + 2 * k.h + x.cwiseAbs().maxCoeff()) / k.h)) + 2;
  for (int z0 = -zr; z0 <= zr; ++z0)
    for (int z1 = -zr; z1 <= zr; ++z1) {
      const int site[2] = {z0, z1};
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) {
          const Vec o = k.offset(a, c);
          const double y0 = x(0) - o(0) - z0 * k.h - f.shift()[0];
          const double y1 = x(1) - o(1) - z1 * k.h - f.shift()[1];
          const double r2 = (y0 * y0 + y1 * y1) / (k.L * k.L);
          if (r2 >= 1) continue;
          out(a) += k.amplitude * M(a, c) * std::pow(1 - r2, 4) * f.noise(site, c);
        }
    }
  return out;
}

// A^2/h^d sum_c M_ac M_bc int phi(y) phi(y + D_abc) dy by a midpoint grid
Mat grid_covariance(const KernelSpec& k, const Vec& delta, int n) {
  const Mat M = k.M();
  const double dx = 2 * k.L / n;
  Mat out = Mat::Zero(2, 2);
  auto phi = [&](double y0, double y1) {
    const double r2 = (y0 * y0 + y1 * y1) / (k.L * k.L);
    return r2 >= 1 ? 0.0 : std::pow(1 - r2, 4);
  };
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        const Vec D = delta + k.offset(a, c) - k.offset(b, c);
        double acc = 0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double y0 = -k.L + (i + 0.5) * dx, y1 = -k.L + (j + 0.5) * dx;
            acc += phi(y0, y1) * phi(y0 + D(0), y1 + D(1));
          }
        out(a, b) += k.amplitude * k.amplitude / (k.h * k.h) * M(a, c) * M(b, c) * acc * dx * dx;
      }
  return out;
}

}  // namespace

TEST_SUITE("random-field") {
  TEST_CASE("Philox4x32-10 known answers") {
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == std::array<uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    const uint32_t f = 0xffffffffu;
    CHECK(philox4x32({f, f, f, f}, {f, f}) == std::array<uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  }

  TEST_CASE("uniform and normal moments") {
    const CounterRng rng(42);
    const int n = 200000;
    double su = 0, su2 = 0, sn = 0, sn2 = 0, sn4 = 0;
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform(i, 1, 2, 3);
      CHECK_FALSE((u <= 0 || u >= 1));
      su += u;
      su2 += u * u;
      const double g = rng.normal(i, 7, 0, 0);
      sn += g;
      sn2 += g * g;
      sn4 += g * g * g * g;
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.005));
    CHECK(su2 / n - (su / n) * (su / n) == doctest::Approx(1.0 / 12).epsilon(0.01));
    CHECK(std::abs(sn / n) < 0.01);
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sn4 / n == doctest::Approx(3.0).epsilon(0.03));
  }

  TEST_CASE("seed mixing separates tags and indices") {
    CHECK(mix_seed(1, 2, 3) == mix_seed(1, 2, 3));
    CHECK(mix_seed(1, 2, 3) != mix_seed(1, 2, 4));
    CHECK(mix_seed(1, 2, 3) != mix_seed(1, 3, 3));
    CHECK(mix_seed(1, 2, 3) != mix_seed(2, 2, 3));
  }

  TEST_CASE("bump derivatives against finite differences") {
    const double y[3] = {0.3, -0.2, 0.1};
    for (int d : {1, 2, 3}) {
      BumpJet b;
      REQUIRE(bump_jet(y, d, 1.0, 3, b));
      const double h = 1e-5;
      for (int i = 0; i < d; ++i) {
        double yp[3] = {y[0], y[1], y[2]}, ym[3] = {y[0], y[1], y[2]};
        yp[i] += h;
        ym[i] -= h;
        BumpJet p, m;
        bump_jet(yp, d, 1.0, 3, p);
        bump_jet(ym, d, 1.0, 3, m);
        CHECK(b.g[i] == doctest::Approx((p.v - m.v) / (2 * h)).epsilon(1e-8));
        for (int k = 0; k < d; ++k) {
          CHECK(b.h[k][i] == doctest::Approx((p.g[k] - m.g[k]) / (2 * h)).epsilon(1e-7));
          for (int l = 0; l < d; ++l) CHECK(b.t[k][l][i] == doctest::Approx((p.h[k][l] - m.h[k][l]) / (2 * h)).epsilon(1e-6));
        }
      }
    }
  }

  TEST_CASE("bump vanishes outside its radius") {
    BumpJet b;
    const double y[2] = {0.8, 0.6};
    CHECK_FALSE(bump_jet(y, 2, 1.0, 3, b));
    const double z[2] = {0.8, 0.59};
    CHECK(bump_jet(z, 2, 1.0, 0, b));
    CHECK(b.v > 0);
  }

  TEST_CASE("realization equals the explicit lattice sum") {
    for (const KernelSpec& k : {default_kernel(2), anisotropic_kernel(2)}) {
      const FieldRealization f(k, 99, box2(2.0));
      for (const Vec& x : {vec2(0, 0), vec2(0.37, -1.2), vec2(1.9, 1.9)})
        CHECK((f.value(x) - explicit_field(f, x)).norm() < 1e-13);
    }
  }

  TEST_CASE("field jets against finite differences") {
    const FieldRealization f(anisotropic_kernel(2), 5, box2(1.0));
    const Vec x = vec2(0.21, -0.33);
    const Jet j = f.jet(x, 3);
    const double h = 1e-5;
    for (int k = 0; k < 2; ++k) {
      Vec xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      const Jet p = f.jet(xp, 2), m = f.jet(xm, 2);
      CHECK((j.jac.col(k) - (p.value - m.value) / (2 * h)).norm() < 1e-7);
      // hess[k](i,j) = d_j d_k F_i
      CHECK((j.hess[k] - (p.jac - m.jac) / (2 * h)).norm() < 1e-6);
      for (int l = 0; l < 2; ++l) CHECK((j.third[l][k] - (p.hess[l] - m.hess[l]) / (2 * h)).norm() < 1e-5);
    }
  }

  TEST_CASE("same seed gives the same field, different seeds differ") {
    const KernelSpec k = default_kernel(2);
    const FieldRealization a(k, 123, box2(1.0)), b(k, 123, box2(3.0)), c(k, 124, box2(1.0));
    const Vec x = vec2(0.5, -0.25);
    CHECK(a.value(x) == b.value(x));
    CHECK(a.value(x) != c.value(x));
  }

  TEST_CASE("closed-form variance of the default kernel") {
    // int (1 - |y|^2)^8 dy over the unit disc is pi/9 and A^2/h^2 = 1
    const Mat C = covariance_oracle(default_kernel(2), Vec::Zero(2), 0, 0);
    CHECK(C(0, 0) == doctest::Approx(std::numbers::pi / 9).epsilon(1e-12));
    CHECK(C(1, 1) == doctest::Approx(std::numbers::pi / 9).epsilon(1e-12));
    CHECK(std::abs(C(0, 1)) < 1e-15);
    CHECK(bump_autocorrelation(default_kernel(2), Vec::Zero(2)) == doctest::Approx(std::numbers::pi / 9).epsilon(1e-12));
    // d = 1: int (1 - s^2)^8 ds = 2^17 (8!)^2 / 17!
    double f8 = 1, f17 = 1;
    for (int i = 2; i <= 8; ++i) f8 *= i;
    for (int i = 2; i <= 17; ++i) f17 *= i;
    CHECK(bump_autocorrelation(default_kernel(1), Vec::Zero(1)) == doctest::Approx(131072.0 * f8 * f8 / f17).epsilon(1e-12));
  }

  TEST_CASE("covariance oracle against a grid integral") {
    for (const KernelSpec& k : {default_kernel(2), anisotropic_kernel(2)})
      for (const Vec& delta : {vec2(0, 0), vec2(0.4, 0.3), vec2(-1.1, 0.6)}) {
        const Mat C = covariance_oracle(k, delta, 0, 0), G = grid_covariance(k, delta, 1200);
        CHECK((C - G).cwiseAbs().maxCoeff() < 1e-5);
      }
  }

  TEST_CASE("derivative covariance is the displacement gradient") {
    const KernelSpec k = anisotropic_kernel(2);
    const Vec delta = vec2(0.3, -0.45);
    const Mat C01 = covariance_oracle(k, delta, 0, 1);
    const double h = 1e-5;
    for (int i = 0; i < 2; ++i) {
      Vec dp = delta, dm = delta;
      dp(i) += h;
      dm(i) -= h;
      const Mat fd = (covariance_oracle(k, dp, 0, 0) - covariance_oracle(k, dm, 0, 0)) / (2 * h);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) CHECK(C01(a, b * 2 + i) == doctest::Approx(fd(a, b)).epsilon(1e-6).scale(1e-3));
    }
  }

  TEST_CASE("covariance oracle against Monte Carlo") {
    const KernelSpec k = anisotropic_kernel(2);
    const Vec x = vec2(0.1, 0.2), delta = vec2(0.35, -0.2);
    const int n = 6000;
    Mat acc = Mat::Zero(2, 2), acc2 = Mat::Zero(2, 2);
    for (int s = 0; s < n; ++s) {
      const FieldRealization f(k, mix_seed(77, 1, s), box2(1.0));
      const Mat p = f.value(x) * f.value(x + delta).transpose();
      acc += p;
      acc2 += p.cwiseProduct(p);
    }
    const Mat mean = acc / n;
    const Mat se = ((acc2 / n - mean.cwiseProduct(mean)) / n).cwiseSqrt();
    const Mat C = covariance_oracle(k, delta, 0, 0);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) CHECK(std::abs(mean(a, b) - C(a, b)) <= 4 * se(a, b));
  }

  TEST_CASE("covariance vanishes exactly beyond the range") {
    const KernelSpec k = anisotropic_kernel(2);
    const Vec far = vec2(k.range() + 1e-9, 0);
    CHECK(covariance_oracle(k, far, 0, 0).isZero(0.0));
    CHECK(covariance_oracle(k, far, 1, 2).isZero(0.0));
    CHECK(covariance_oracle(default_kernel(2), vec2(0, 2.0), 0, 0).isZero(0.0));
  }

  TEST_CASE("evaluation outside the box is a coverage error") {
    const FieldRealization f(default_kernel(2), 1, box2(1.0));
    try {
      f.value(vec2(1.5, 0));
      FAIL("expected coverage error");
    } catch (const CoverageError& e) {
      CHECK(std::string(e.what()).find("widen") != std::string::npos);
    }
  }

  TEST_CASE("kernel and mixing constraints") {
    KernelSpec k = default_kernel(2);
    k.h = 0.3;
    CHECK_THROWS_AS(k.validate(), ConstraintError);
    const KernelSpec ok = default_kernel(2);
    CHECK(kappa_upper(2, 8.0) == doctest::Approx(1.0 / 3 - 1.0 / 8));
    CHECK_NOTHROW(mixing_profile(ok, 0.05, 8.0));
    CHECK_THROWS_AS(mixing_profile(ok, 0.25, 8.0), ConstraintError);
    CHECK_THROWS_AS(mixing_profile(ok, 0.0, 8.0), ConstraintError);
    CHECK_THROWS_AS(mixing_profile(ok, 0.05, 3.0), ConstraintError);
    const MixingProfile m = mixing_profile(ok, 0.05, 8.0);
    CHECK(m.alpha(m.range + 1e-12) == 0.0);
    CHECK(m.alpha_integral() == doctest::Approx(m.range * std::pow(0.25, 0.05)));
  }

  TEST_CASE("zero amplitude field is identically zero") {
    KernelSpec k = default_kernel(2);
    k.amplitude = 0;
    const FieldRealization f(k, 3, box2(1.0));
    const Jet j = f.jet(vec2(0.2, 0.2), 3);
    CHECK(j.value.isZero(0.0));
    CHECK(j.jac.isZero(0.0));
  }
}

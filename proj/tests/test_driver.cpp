#include <doctest.h>

#include <cmath>
#include <random>

#include "roughflow/driver.hpp"
#include "roughflow/errors.hpp"
#include "roughflow/toy.hpp"

using namespace roughflow;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// V_ts = g(s,t) * c for a scalar profile g
TwoTimeVectorField scalar_profile(const Vec& c, double (*g)(double, double)) {
  TwoTimeVectorField V;
  V.dim = static_cast<int>(c.size());
  V.max_order = 3;
  V.eval = [c, g](double s, double t, const Vec&, int order) {
    Jet j(static_cast<int>(c.size()), order);
    j.value = g(s, t) * c;
    return j;
  };
  return V;
}

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

// 1/2 int int_{u2<u1} [A_{u2} x, A_{u1} x] by a midpoint double sum; [Ax, Bx] = (BA - AB) x
Vec brute_force_W(const Mat& A, const Mat& B, double tb, double T, const Vec& x, int n) {
  const double h = T / n;
  Mat acc = Mat::Zero(2, 2), prefix = Mat::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const double u1 = (i + 0.5) * h;
    const Mat& A1 = u1 < tb ? A : B;
    // inner integral over u2 < u1: full cells before i plus half of cell i (same matrix)
    const Mat inner = prefix + 0.5 * h * A1;
    acc += h * (A1 * inner - inner * A1);
    prefix += h * A1;
  }
  return 0.5 * acc * x;
}

}  // namespace

TEST_SUITE("driver-core") {
  TEST_CASE("additivity defect of linear-in-time increments is zero") {
    const auto V = scalar_profile(vec2(1.0, -2.0), [](double s, double t) { return t - s; });
    const SpatialDomain dom(2, -1.0, 1.0, 3);
    CHECK(additivity_defect(V, 0.0, 0.3, 1.0, dom) < 1e-15);
  }

  TEST_CASE("quadratic increments break additivity by the cross term") {
    const Vec v = vec2(3.0, 4.0);
    const auto V = scalar_profile(v, [](double s, double t) { return (t - s) * (t - s); });
    const SpatialDomain dom(2, -1.0, 1.0, 2);
    CHECK(additivity_defect(V, 0.0, 0.5, 1.0, dom) == doctest::Approx(0.5 * v.norm()).epsilon(1e-14));
  }

  TEST_CASE("out of order times are rejected") {
    const auto V = scalar_profile(vec2(1, 0), [](double s, double t) { return t - s; });
    CHECK_THROWS_AS(additivity_defect(V, 0.5, 0.2, 1.0, SpatialDomain(2, 0, 1, 2)), ArgumentError);
  }

  TEST_CASE("canonical lift of a constant field") {
    const Vec c = vec2(0.7, -0.2);
    const RoughDriver d = canonical_lift(constant_field(c), TimeGrid::uniform(1.0, 4));
    const Vec x = vec2(0.3, 0.1);
    CHECK((d.V(0.1, 0.8, x, 0).value - 0.7 * c).norm() < 1e-14);
    CHECK(d.W(0.1, 0.8, x, 0).value.norm() < 1e-15);
  }

  TEST_CASE("piecewise matrix lift matches a brute-force double sum") {
    const Mat A = mat2(0, 1, 0, 0), B = mat2(0, 0, 1, 0);
    const RoughDriver d = canonical_lift(piecewise_linear_field(A, B, 0.5), TimeGrid::uniform(1.0, 2));
    const Vec x = vec2(0.4, -1.3);
    const Vec ref = brute_force_W(A, B, 0.5, 1.0, x, 10000);
    const Vec got = d.W(0.0, 1.0, x, 0).value;
    CHECK((got - ref).norm() < 1e-6);
    // the closed form under the one-half convention
    CHECK((got - 0.125 * (B * A - A * B) * x).norm() < 1e-12);
  }

  TEST_CASE("toy lift first level is the closed form") {
    const PhaseFunction f = tanh_phase(0.5, vec2(1.0, 0.5));
    const RoughDriver d = canonical_lift(toy_field(f), TimeGrid::uniform(1.0, 4));
    for (const Vec& x : {vec2(0, 0), vec2(0.3, -0.7)}) {
      CHECK((d.V(0.2, 0.9, x, 0).value - toy_first_level(f, 0.2, 0.9, x)).norm() < 1e-12);
    }
  }

  TEST_CASE("Chen relation holds for lifts and fails for the doubled second level") {
    const PhaseFunction f = tanh_phase(0.5, vec2(1.0, 0.5));
    const TimeGrid grid = TimeGrid::uniform(1.0, 8);
    const SpatialDomain dom(2, -1.0, 1.0, 4);
    const Mat A = mat2(0, 1, 0, 0), B = mat2(0, 0, 1, 0);
    for (const auto& field : {toy_field(f), piecewise_linear_field(A, B, 0.5)}) {
      const RoughDriver d = canonical_lift(field, grid);
      CHECK(chen_defect(d, 0.0, 0.5, 1.0, dom) < 1e-10);
      CHECK(chen_defect(d, 0.125, 0.375, 0.875, dom) < 1e-10);
      RoughDriver bad = d;
      const TwoTimeVectorField W = d.W;
      bad.W.eval = [W](double s, double t, const Vec& x, int o) { return W(s, t, x, o).scaled(2.0); };
      // with W doubled, 2W_ts - 2W_tu - 2W_us - B/2 = B/2 wherever Chen holds
      double expect = 0.0;
      for (const Vec& x : dom.points()) {
        const Vec e = 0.5 * lie_bracket(d.V(0.0, 0.5, x, 1), d.V(0.5, 1.0, x, 1), 0).value;
        expect = std::max(expect, e.norm());
      }
      const double got = chen_defect(bad, 0.0, 0.5, 1.0, dom);
      CHECK(got > 1e-7);
      CHECK(std::abs(got - expect) < 1e-9);
    }
  }

  TEST_CASE("time-independent lifts have parallel increments") {
    const RoughDriver d = canonical_lift(linear_field(mat2(0.3, -1, 1, 0.2)), TimeGrid::uniform(1.0, 4));
    CHECK(chen_defect(d, 0.0, 0.25, 1.0, SpatialDomain(2, -1, 1, 3)) < 1e-12);
    CHECK(d.W(0.0, 1.0, vec2(0.5, 0.5), 0).value.norm() < 1e-12);
  }

  TEST_CASE("Chen defect needs jacobians") {
    RoughDriver d = zero_driver(2, 1.0);
    d.V.max_order = 0;
    CHECK_THROWS_AS(chen_defect(d, 0, 0.5, 1, SpatialDomain(2, 0, 1, 2)), CapabilityError);
  }

  TEST_CASE("degenerate interval returns exact zero") {
    const RoughDriver d = canonical_lift(toy_field(tanh_phase(0.5, vec2(1, 0.5))), TimeGrid::uniform(1.0, 2));
    CHECK(d.V(0.4, 0.4, vec2(0.1, 0.2), 1).value.norm() == 0.0);
    CHECK(d.W(0.4, 0.4, vec2(0.1, 0.2), 0).value.norm() == 0.0);
  }

  TEST_CASE("perturbing the second level by an additive path") {
    const PhaseFunction f = tanh_phase(0.5, vec2(1.0, 0.5));
    const RoughDriver d = canonical_lift(toy_field(f), TimeGrid::uniform(1.0, 4));
    const Vec b = vec2(0.25, -0.5);
    const RoughDriver p = perturb_second_level(d, [b](double t, const Vec&, int order) {
      Jet j(2, order);
      j.value = t * b;
      return j;
    });
    const Vec x = vec2(0.2, 0.3);
    CHECK((p.W(0.2, 0.7, x, 0).value - d.W(0.2, 0.7, x, 0).value - 0.5 * b).norm() < 1e-14);
    CHECK((p.V(0.2, 0.7, x, 0).value - d.V(0.2, 0.7, x, 0).value).norm() == 0.0);
    const SpatialDomain dom(2, -1, 1, 3);
    CHECK(std::abs(chen_defect(p, 0, 0.5, 1, dom) - chen_defect(d, 0, 0.5, 1, dom)) < 1e-12);
    const RoughDriver same = perturb_second_level(d, [](double, const Vec&, int order) { return Jet(2, order); });
    CHECK((same.W(0.1, 0.9, x, 0).value - d.W(0.1, 0.9, x, 0).value).norm() == 0.0);
  }

  TEST_CASE("driver norm of the zero driver and of a linear first level") {
    const TimeGrid grid = TimeGrid::uniform(1.0, 8);
    const SpatialDomain dom(2, -1, 1, 5);
    DriverRegularity reg;
    CHECK(driver_holder_norm(zero_driver(2, 1.0), reg, grid, dom).value() == 0.0);
    RoughDriver d = zero_driver(2, 1.0);
    const Vec c = vec2(1.0, 0.0);
    d.V = scalar_profile(c, [](double s, double t) { return t - s; });
    d.V.horizon = 1.0;
    // constant field of C^{2+r} norm |c| = 1: sup (t-s)^{1/2} at (0,1)
    CHECK(driver_holder_norm(d, reg, grid, dom).v_part == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("driver norm is homogeneous level by level") {
    const RoughDriver d = canonical_lift(toy_field(tanh_phase(0.5, vec2(1, 0.5))), TimeGrid::uniform(1.0, 4));
    const double lam = 3.0;
    RoughDriver s = d;
    const auto V = d.V;
    const auto W = d.W;
    s.V.eval = [V, lam](double a, double b, const Vec& x, int o) { return V(a, b, x, o).scaled(lam); };
    s.W.eval = [W, lam](double a, double b, const Vec& x, int o) { return W(a, b, x, o).scaled(lam * lam); };
    const TimeGrid grid = TimeGrid::uniform(1.0, 4);
    const SpatialDomain dom(2, -0.5, 0.5, 4);
    DriverRegularity reg;
    const DriverNorm n1 = driver_holder_norm(d, reg, grid, dom), n2 = driver_holder_norm(s, reg, grid, dom);
    CHECK(n2.v_part == doctest::Approx(lam * n1.v_part).epsilon(1e-10));
    CHECK(n2.w_part == doctest::Approx(lam * lam * n1.w_part).epsilon(1e-10));
  }

  TEST_CASE("toy lift norm is stable under grid refinement") {
    const RoughDriver d = canonical_lift(toy_field(tanh_phase(0.5, vec2(1, 0.5))), TimeGrid::uniform(1.0, 8));
    const SpatialDomain dom(2, -0.5, 0.5, 4);
    DriverRegularity reg;
    const double a = driver_holder_norm(d, reg, TimeGrid::uniform(1.0, 8), dom).value();
    const double b = driver_holder_norm(d, reg, TimeGrid::uniform(1.0, 16), dom).value();
    CHECK(std::isfinite(a));
    CHECK(b >= a - 1e-12);
    CHECK(std::abs(b - a) <= 0.1 * b);
  }

  TEST_CASE("field jacobians agree with central differences") {
    const SmoothVectorField v = toy_field(tanh_phase(0.5, vec2(1, 0.5)));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1, 1);
    const double h = 1e-4;
    for (int n = 0; n < 100; ++n) {
      const Vec x = vec2(U(rng), U(rng));
      const double t = 0.5 * (U(rng) + 1);
      const Jet j = v(t, x, 2);
      for (int k = 0; k < 2; ++k) {
        Vec e = Vec::Zero(2);
        e(k) = h;
        const Vec fd = (v(t, x + e, 0).value - v(t, x - e, 0).value) / (2 * h);
        CHECK((fd - j.jac.col(k)).norm() <= 1e-5 * std::max(1.0, j.jac.col(k).norm()));
        const Mat fdj = (v(t, x + e, 1).jac - v(t, x - e, 1).jac) / (2 * h);
        CHECK((fdj - j.hess[k]).norm() <= 1e-5 * std::max(1.0, j.hess[k].norm()));
      }
    }
  }

  TEST_CASE("Lie bracket of linear fields is the commutator") {
    const Mat A = mat2(0, 1, 0, 0), B = mat2(0, 0, 1, 0);
    const Vec x = vec2(0.3, -0.4);
    Jet a(2, 1), b(2, 1);
    a.value = A * x;
    a.jac = A;
    b.value = B * x;
    b.jac = B;
    CHECK((lie_bracket(a, b, 0).value - (B * A - A * B) * x).norm() < 1e-15);
  }

  TEST_CASE("zero substeps are rejected") {
    QuadConfig q;
    q.substeps = 0;
    CHECK_THROWS_AS(canonical_lift(constant_field(vec2(1, 0)), TimeGrid::uniform(1.0, 2), q), ArgumentError);
  }
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "roughflow/driver.hpp"
#include "roughflow/errors.hpp"
#include "roughflow/flow.hpp"
#include "roughflow/toy.hpp"

using namespace roughflow;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// 1/2 int int_{u2<u1} [v_{u2}, v_{u1}](x) by a midpoint double sum, [A,B] = (DB)A - (DA)B
Vec brute_force_area(const SmoothVectorField& v, double s, double t, const Vec& x, int n) {
  const double h = (t - s) / n;
  Vec P = Vec::Zero(2), acc = Vec::Zero(2);
  Mat DP = Mat::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const Jet j = v((s + (i + 0.5) * h), x, 1);
    const Vec Pi = P + 0.5 * h * j.value;
    const Mat DPi = DP + 0.5 * h * j.jac;
    acc += h * (j.jac * Pi - DPi * j.value);
    P += h * j.value;
    DP += h * j.jac;
  }
  return 0.5 * acc;
}

const PhaseFunction kTanh = tanh_phase(0.5, vec2(1, 0.5));

}  // namespace

TEST_SUITE("toy-pure-area") {
  TEST_CASE("first level examples") {
    const Vec x = vec2(0.3, -0.2);
    CHECK(toy_first_level(kTanh, 0.7, 0.7, x).norm() == 0.0);
    const double pi = std::acos(-1.0);
    const PhaseFunction q = constant_phase(pi / 2);
    CHECK((toy_first_level(q, 0.0, 1.0, x) - vec2(-1, 1)).norm() < 1e-15);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-5, 5);
    for (int i = 0; i < 200; ++i) {
      const double a = U(rng), b = U(rng);
      CHECK(toy_first_level(kTanh, a, b, vec2(U(rng), U(rng))).norm() <= 2.0 + 1e-15);
    }
  }

  TEST_CASE("first level jet against finite differences") {
    const Vec x = vec2(0.4, 0.1);
    const Jet j = toy_first_level_jet(kTanh, 0.2, 1.3, x, 2);
    const double h = 1e-5;
    for (int k = 0; k < 2; ++k) {
      Vec xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      const Vec fd = (toy_first_level(kTanh, 0.2, 1.3, xp) - toy_first_level(kTanh, 0.2, 1.3, xm)) / (2 * h);
      CHECK((j.jac.col(k) - fd).norm() < 1e-8);
      const Mat fd2 = (toy_first_level_jet(kTanh, 0.2, 1.3, xp, 1).jac - toy_first_level_jet(kTanh, 0.2, 1.3, xm, 1).jac) / (2 * h);
      CHECK((j.hess[k] - fd2).norm() < 1e-7);
    }
    CHECK_THROWS_AS(toy_first_level_jet(kTanh, 0.0, 1.0, x, 3), CapabilityError);
  }

  TEST_CASE("constant phase has no area") {
    const PhaseFunction c = constant_phase(1.7);
    for (double t : {0.5, 3.0, 40.0}) CHECK(toy_second_level(c, 0.0, t, vec2(0.2, 0.9)).norm() == 0.0);
  }

  TEST_CASE("main term example") {
    const PhaseFunction f = affine_phase(1.0, vec2(0.1, 0.0));
    CHECK((toy_second_level_main(f, 0.0, 1.0, Vec::Zero(2)) - vec2(-0.025, 0)).norm() < 1e-16);
  }

  TEST_CASE("closed-form second level against a brute-force area") {
    const SmoothVectorField v = toy_field(kTanh);
    CHECK((toy_second_level(kTanh, 0.0, 1.0, Vec::Zero(2)) - brute_force_area(v, 0.0, 1.0, Vec::Zero(2), 4000)).norm() < 1e-6);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1, 1), T(0, 3);
    for (int i = 0; i < 50; ++i) {
      double s = T(rng), t = T(rng);
      if (s > t) std::swap(s, t);
      const Vec x = vec2(U(rng), U(rng));
      const Vec ref = brute_force_area(v, s, t, x, 4000);
      CHECK((toy_second_level(kTanh, s, t, x) - ref).norm() < 1e-6);
    }
  }

  TEST_CASE("closed-form second level agrees with the canonical lift") {
    const RoughDriver d = canonical_lift(toy_field(kTanh), TimeGrid::uniform(2.0, 8), QuadConfig{8, 32});
    for (const Vec& x : {vec2(0, 0), vec2(0.5, -0.3)})
      CHECK((d.W(0.0, 2.0, x, 0).value - toy_second_level(kTanh, 0.0, 2.0, x)).norm() < 1e-8);
  }

  TEST_CASE("remainder beyond the main term grows at most linearly") {
    const Vec x = vec2(0.1, 0.2);
    const double g = (0.5 * vec2(1, 0.5)).norm();
    for (double t : {1.0, 10.0, 100.0, 1000.0}) {
      const Vec rem = toy_second_level(kTanh, 0.0, t, x) - toy_second_level_main(kTanh, 0.0, t, x);
      CHECK(rem.norm() <= 5 * g * (1 + t));
    }
  }

  TEST_CASE("rescaled first level is bounded by 2 eps") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1, 1), T(0, 1);
    for (double eps : {0.5, 0.1, 0.01}) {
      const RoughDriver d = rescaled_driver({eps, kTanh, 1.0});
      for (int i = 0; i < 50; ++i) {
        double s = T(rng), t = T(rng);
        if (s > t) std::swap(s, t);
        CHECK(d.V(s, t, vec2(U(rng), U(rng)), 0).value.norm() <= 2 * eps + 1e-15);
      }
    }
  }

  TEST_CASE("eps = 1 reproduces the unscaled driver") {
    const RoughDriver d = rescaled_driver({1.0, kTanh, 2.0});
    const Vec x = vec2(0.3, 0.7);
    CHECK((d.V(0.2, 1.9, x, 0).value - toy_first_level(kTanh, 0.2, 1.9, x)).norm() == 0.0);
    CHECK((d.W(0.2, 1.9, x, 0).value - toy_second_level(kTanh, 0.2, 1.9, x)).norm() == 0.0);
  }

  TEST_CASE("rescaled driver satisfies Chen") {
    const RoughDriver d = rescaled_driver({0.25, kTanh, 1.0});
    const SpatialDomain dom(2, -0.5, 0.5, 3);
    CHECK(chen_defect(d, 0.0, 0.5, 1.0, dom) <= 1e-8);
    CHECK(chen_defect(d, 0.1, 0.37, 0.9, dom) <= 1e-8);
  }

  TEST_CASE("invalid family parameters") {
    CHECK_THROWS_AS(rescaled_driver({0.0, kTanh, 1.0}), ArgumentError);
    CHECK_THROWS_AS(rescaled_driver({1.5, kTanh, 1.0}), ArgumentError);
    CHECK_THROWS_AS(rescaled_driver({0.5, kTanh, -1.0}), ArgumentError);
  }

  TEST_CASE("limit driver and its flow") {
    const PhaseFunction f = affine_phase(1.0, vec2(0.1, 0.0));
    const RoughDriver lim = limit_driver(f);
    CHECK((lim.W(0.0, 1.0, vec2(3, 4), 0).value - vec2(-0.025, 0)).norm() < 1e-16);
    CHECK(lim.V(0.0, 1.0, vec2(3, 4), 0).value.norm() == 0.0);
    // xdot = -t/2 f(0) grad f(0) from the origin; frozen value for the tanh phase at t = 1
    const Vec end = limit_flow(kTanh, 1.0, Vec::Zero(2));
    CHECK((end - vec2(-0.125, -0.0625)).norm() < 1e-15);
    SolverConfig cfg;
    cfg.refinement = 7;
    const FlowMap fm = solve_flow(limit_driver(kTanh), cfg, TimeGrid::uniform(1.0, 1));
    CHECK((fm(0.0, 1.0, Vec::Zero(2)) - end).norm() < 1e-14);
  }

  TEST_CASE("phase vanishing at the origin gives the zero limit") {
    const PhaseFunction z = affine_phase(0.0, vec2(0.3, -0.2));
    const RoughDriver lim = limit_driver(z);
    CHECK(lim.W(0.0, 1.0, vec2(1, 1), 0).value.norm() == 0.0);
    CHECK(limit_flow(z, 1.0, vec2(1, 1)) == vec2(1, 1));
  }

  TEST_CASE("convergence report") {
    const SpatialDomain dom(2, -0.5, 0.5, 5);
    const ToyReport rep = convergence_report(kTanh, {0.4, 0.2, 0.1}, dom);
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.slope >= 0.35);
    CHECK(rep.slope <= 0.65);
    for (size_t i = 1; i < rep.rows.size(); ++i) {
      CHECK(rep.rows[i].w_dist < rep.rows[i - 1].w_dist);
      CHECK(rep.rows[i].flow_err_corrected < rep.rows[i - 1].flow_err_corrected);
    }
  }

  TEST_CASE("constant phase report has no second-level distance") {
    const ToyReport rep = convergence_report(constant_phase(1.0), {0.4, 0.2, 0.1}, SpatialDomain(2, -0.1, 0.1, 2),
                                             ToyReportConfig{0.25, 1.0, 8, 6});
    for (const auto& r : rep.rows) {
      CHECK(r.w_dist == 0.0);
      CHECK(r.flow_err_limit <= 2 * r.eps + 1e-12);
    }
  }

  TEST_CASE("report input checks") {
    const SpatialDomain dom(2, -0.1, 0.1, 2);
    CHECK_THROWS_AS(convergence_report(kTanh, {0.2, 0.1}, dom), ArgumentError);
    ToyReportConfig bad;
    bad.gamma = 0.5;
    CHECK_THROWS_AS(convergence_report(kTanh, {0.4, 0.2, 0.1}, dom, bad), ArgumentError);
  }
}

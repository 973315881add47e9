#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hfavg/averaging.hpp"
#include "hfavg/potentials.hpp"
#include "hfavg/scenarios.hpp"

using namespace hfavg;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("time-independent potential has trivial averages") {
  const TimePeriodicPotential p =
      separable_potential(TrigPolynomial{1.0, {}, {}}, StaticShape::quartic, 2);
  const PeriodicFieldStack stack(p);
  const Vec x = vec2(0.3, -0.6);
  CHECK(effective_potential(stack, x) == doctest::Approx(0.0));
  CHECK(magnetic_vector(stack, x).norm() < 1e-15);
  const AveragedSystem sys = assemble(p, 0.01);
  CHECK((sys.acceleration(x, vec2(1, 1)) + shape_gradient(StaticShape::quartic, x)).norm() < 1e-13);
}

TEST_CASE("rotating saddle averages") {
  const BuiltScenario b = build_scenario(find_scenario(default_catalog(), "rotating_saddle")->defaults);
  const PeriodicFieldStack stack(b.fast);
  const double T = b.phase_period;
  for (const Vec& x : {vec2(1, 0), vec2(0.3, -0.8)}) {
    // W = |x|^2 / 2 and b = (y, -x) in the scenario's variables
    CHECK(effective_potential(stack, x) * T * T == doctest::Approx(0.5 * x.squaredNorm()).epsilon(1e-12));
    CHECK((magnetic_vector(stack, x) * b.to_scenario_b() - vec2(x[1], -x[0])).norm() < 1e-12);
    const Mat B = magnetic_matrix(stack, x) * b.to_scenario_b();
    CHECK(B(0, 1) == doctest::Approx(-2.0).epsilon(1e-8));
    CHECK(B(1, 0) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(field_strength(B) == doctest::Approx(-4.0).epsilon(1e-8));
  }
}

TEST_CASE("satellite closed forms at sample points") {
  const BuiltScenario b = build_scenario(find_scenario(default_catalog(), "satellite")->defaults);
  const PeriodicFieldStack stack(b.fast);
  const PointFields at10 = stack.at(vec2(1, 0));
  CHECK((at10.mean_shess_vgrad() * b.to_scenario_b() - vec2(0, -5.34375)).norm() < 1e-9);
  CHECK(b.to_scenario_w(at10.mean_vgrad_sq()) == doctest::Approx(3.65625).epsilon(1e-12));
  const PointFields at01 = stack.at(vec2(0, 1));
  CHECK((at01.mean_shess_vgrad() * b.to_scenario_b() - vec2(5.34375, 0)).norm() < 1e-9);
  const PointFields at20 = stack.at(vec2(2, 0));
  CHECK(at20.ubar() * b.phase_period == doctest::Approx(-1.0 / 16).epsilon(1e-12));
}

TEST_CASE("skew symmetry and the planar curl identity") {
  const BuiltScenario b = build_scenario(find_scenario(default_catalog(), "ruled_surface")->defaults);
  const PeriodicFieldStack stack(b.fast);
  const Vec x = vec2(1.3, -0.9);
  const Mat B = magnetic_matrix(stack, x);
  CHECK((B + B.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const double h = 1e-4;
  auto bv = [&](double dx, double dy) { return magnetic_vector(stack, x + vec2(dx, dy)); };
  const double curl = (bv(h, 0)[1] - bv(-h, 0)[1]) / (2 * h) - (bv(0, h)[0] - bv(0, -h)[0]) / (2 * h);
  CHECK(field_strength(B) == doctest::Approx(2 * curl).epsilon(1e-6));
}

TEST_CASE("W' from Parseval agrees with a difference quotient of W") {
  const TimePeriodicPotential p = polynomial_potential(parse_polynomial_terms("0.25:4,0:cos:1;1:1,1:sin:2"));
  const PeriodicFieldStack stack(p);
  const Vec x = vec2(0.6, 0.2);
  const Vec g = effective_potential_grad(stack, x);
  auto err = [&](double h) {
    Vec fd(2);
    for (int i = 0; i < 2; ++i) {
      Vec e = Vec::Zero(2);
      e[i] = h;
      fd[i] = (effective_potential(stack, x + e) - effective_potential(stack, x - e)) / (2 * h);
    }
    return (fd - g).norm();
  };
  CHECK(std::log2(err(1e-2) / err(5e-3)) >= 1.9);
}

TEST_CASE("separable potentials carry no magnetic term") {
  const TrigPolynomial a{0.3, {1.0, 0.2}, {0.5}};
  const TimePeriodicPotential p = separable_potential(a, StaticShape::pendulum, 2);
  const PeriodicFieldStack stack(p);
  for (const Vec& x : {vec2(0.1, 0.9), vec2(-1.2, 0.4)}) CHECK(magnetic_vector(stack, x).norm() <= 1e-10);
}

TEST_CASE("order weights") {
  const BuiltScenario sat = build_scenario(find_scenario(default_catalog(), "satellite")->defaults);
  const AveragedSystem s = sat.assemble(0.05);
  const double e = sat.lib_eps(0.05);
  CHECK(s.w_weight() == doctest::Approx(std::pow(e, 4)));
  CHECK(s.b_weight() == doctest::Approx(std::pow(e, 5)));
  const TimePeriodicPotential p = rotating_saddle_potential();
  const AveragedSystem t = assemble(p, 0.1);
  CHECK(t.w_weight() == doctest::Approx(0.01));
  CHECK(t.b_weight() == doctest::Approx(0.001));
}

TEST_CASE("effective Hamiltonian momentum") {
  const TimePeriodicPotential p = rotating_saddle_potential();
  const EffectiveHamiltonian H(assemble(p, 0.1));
  const Vec X = vec2(0.5, 0.1), V = vec2(0.2, -0.3);
  const Vec P = H.momentum(X, V);
  CHECK((P - V - 0.001 * magnetic_vector(H.system().stack(), X)).norm() < 1e-15);
  CHECK(std::isfinite(H(X, P)));
}

TEST_CASE("mode count must resolve the potential") {
  const TimePeriodicPotential p = rotating_saddle_potential();
  const PeriodicFieldStack coarse(p, 4), fine(p, 32);
  const Vec x = vec2(0.7, 0.2);
  CHECK(effective_potential(coarse, x) == doctest::Approx(effective_potential(fine, x)).epsilon(1e-13));
  (void)kTwoPi;
}

#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "hfavg/dynamics.hpp"
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

TimePeriodicPotential harmonic() {
  return separable_potential(TrigPolynomial{1.0, {}, {}}, StaticShape::harmonic, 2);
}

TimePeriodicPotential uniform_gravity(double g) {
  return TimePeriodicPotential(
      2, [g](const Vec& x, double) { return g * x[1]; },
      [g](const Vec&, double) { return vec2(0, g); },
      [](const Vec&, double) { return Mat(Mat::Zero(2, 2)); });
}
}  // namespace

TEST_CASE("harmonic oscillator matches the analytic solution") {
  const Trajectory tr = integrate_full(harmonic(), vec2(1, 0), vec2(0, 0.5), 0.05, 3.0, 64, 4);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double t = tr.times()[i];
    CHECK((tr.positions()[i] - vec2(std::cos(t), 0.5 * std::sin(t))).norm() < 1e-10);
  }
  CHECK(tr.back_time() == doctest::Approx(3.0));
  CHECK(tr.meta.system == "full");
}

TEST_CASE("RK4 self-convergence on a fast potential") {
  const TimePeriodicPotential p = rotating_saddle_potential();
  const double eps = 0.05;
  auto end = [&](int spp) { return integrate_full(p, vec2(0.3, 0.1), vec2(0, 0), eps, 1.0, spp, 1 << 20).positions().back(); };
  const Vec ref = end(256);
  const double e1 = (end(16) - ref).norm(), e2 = (end(32) - ref).norm();
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("energy is conserved on autonomous runs") {
  const TimePeriodicPotential p = separable_potential(TrigPolynomial{1.0, {}, {}}, StaticShape::pendulum, 2);
  const Trajectory tr = integrate_full(p, vec2(0.5, 1.0), vec2(0.3, -0.2), 1.0 / 64, 10.0, 128, 32);
  auto energy = [&](std::size_t i) { return 0.5 * tr.velocities()[i].squaredNorm() + p.value(tr.positions()[i], 0); };
  for (std::size_t i = 0; i < tr.size(); ++i) CHECK(std::abs(energy(i) - energy(0)) <= 1e-8 * std::abs(energy(0)));
}

TEST_CASE("trajectory invariants") {
  Trajectory tr(2);
  tr.append(0.0, vec2(0, 0), vec2(1, 0));
  CHECK_THROWS_AS(tr.append(0.0, vec2(1, 0), vec2(1, 0)), InvalidArgument);
  CHECK_THROWS_AS(tr.append(1.0, vec2(NAN, 0), vec2(1, 0)), NonFiniteError);
  tr.append(1.0, vec2(1, 0), vec2(1, 0));
  CHECK((tr.position_at(0.5) - vec2(0.5, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(tr.position_at(2.0), InvalidArgument);
}

TEST_CASE("leaving the validity region truncates and flags") {
  const TimePeriodicPotential p = kepler_potential(1.0, 0.5);
  const Trajectory tr = integrate_full(p, vec2(1, 0), vec2(-3, 0), 0.01, 2.0, 16);
  CHECK(tr.meta.exited_region);
  CHECK(tr.meta.exit_time < 2.0);
  CHECK(tr.back_time() < tr.meta.exit_time);
}

TEST_CASE("averaged integrator on a harmonic system") {
  const AveragedSystem sys = assemble(harmonic(), 0.1);
  const Trajectory tr = integrate_averaged(sys, vec2(1, 0), vec2(0, 1), 2.0, 1e-3, 100);
  CHECK((tr.positions().back() - vec2(std::cos(2.0), std::sin(2.0))).norm() < 1e-11);
}

TEST_CASE("effective Hamiltonian is conserved along averaged output") {
  const BuiltScenario b = build_scenario(find_scenario(default_catalog(), "ruled_surface")->defaults);
  const AveragedSystem sys = b.assemble(0.05);
  const EffectiveHamiltonian H(sys);
  const Trajectory tr = integrate_averaged(sys, vec2(2, 0), vec2(0, 0.3), 4.0, 1e-2, 10);
  auto k = [&](std::size_t i) { return H(tr.positions()[i], H.momentum(tr.positions()[i], tr.velocities()[i])); };
  // The truncated force law conserves K + b_weight^2 |b|^2 / 2 exactly; K
  // itself moves only at that order.
  const double w = sys.b_weight();
  auto k_exact = [&](std::size_t i) {
    return k(i) + 0.5 * w * w * sys.b_vec(tr.positions()[i]).squaredNorm();
  };
  double k_span = 0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(std::abs(k_exact(i) - k_exact(0)) < 1e-13);
    k_span = std::max(k_span, std::abs(k(i) - k(0)));
  }
  CHECK(k_span > 1e-13);
  CHECK(k_span < 1e-9);
}

TEST_CASE("guiding center") {
  SUBCASE("time-independent potential leaves x unchanged") {
    const PeriodicFieldStack stack(harmonic());
    CHECK((guiding_center(stack, vec2(0.3, 0.4), vec2(1, 2), 0.7, 0.1, AveragingOrder::standard) - vec2(0.3, 0.4)).norm() < 1e-15);
  }
  SUBCASE("rotating saddle closed form") {
    const RotatingSaddleScenario s = rotating_saddle();
    const PeriodicFieldStack stack(s.potential);
    const double eps = 0.02, lib = s.phase_period * eps;
    for (double t : {0.0, 0.013, 0.4}) {
      const Vec x = vec2(0.4, -0.3), v = vec2(0.2, 0.5);
      CHECK((guiding_center(stack, x, v, t, lib, AveragingOrder::standard) - s.transform(x, v, t, eps)).norm() < 1e-13);
    }
  }
  SUBCASE("offset scales as eps^2, and eps^3 for order 1") {
    const TimePeriodicPotential p = polynomial_potential(parse_polynomial_terms("0.25:4,0:cos:1;1:1,1:cos:1"));
    const PeriodicFieldStack stack(p);
    const Vec x = vec2(0.5, 0.3), v = vec2(0.1, 0.2);
    auto d = [&](double e, AveragingOrder o) { return (guiding_center(stack, x, v, 0.1, e, o) - x).norm(); };
    CHECK(d(0.01, AveragingOrder::standard) / d(0.005, AveragingOrder::standard) == doctest::Approx(4.0).epsilon(0.05));
    CHECK(d(0.01, AveragingOrder::order1) / d(0.005, AveragingOrder::order1) == doctest::Approx(8.0).epsilon(0.05));
  }
}

TEST_CASE("dumbbell in uniform gravity") {
  DumbbellState s0;
  s0.z = vec2(0, 0);
  s0.zdot = vec2(1, 2);
  s0.theta = 0.3;
  s0.theta_dot = 5.0;
  const DumbbellTrajectory tr = integrate_dumbbell(uniform_gravity(1.0), s0, 0.01, 1.0, 1e-3, 10);
  const DumbbellState& s = tr.states.back();
  CHECK(s.theta_dot == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(s.theta == doctest::Approx(5.3).epsilon(1e-12));
  CHECK((s.z - vec2(1.0, 2.0 - 0.5)).norm() < 1e-12);
}

TEST_CASE("dumbbell in a Kepler field") {
  const SatelliteScenario sat = satellite(-1.0, 0.5);
  const double eps = 0.01;
  DumbbellState s0;
  s0.z = vec2(1, 0);
  s0.zdot = vec2(0, 1.2);
  s0.theta_dot = 1.0 / eps;
  const DumbbellTrajectory tr = integrate_dumbbell(sat.ambient(), s0, eps, 15.0, kTwoPi * eps / 64, 16);
  const double l0 = dumbbell_angular_momentum(s0, eps);
  double spin = 0, mom = 0;
  for (const auto& s : tr.states) {
    spin = std::max(spin, std::abs(s.theta_dot - s0.theta_dot));
    mom = std::max(mom, std::abs(dumbbell_angular_momentum(s, eps) - l0));
  }
  CHECK(spin < 0.01 * s0.theta_dot);
  CHECK(mom < 1e-10 * std::abs(l0));
  CHECK(tr.generalized().dim() == 3);
}

TEST_CASE("CSV round trip and metadata") {
  const Trajectory tr = integrate_full(harmonic(), vec2(1, 0), vec2(0, 1), 0.1, 0.5, 16, 3);
  std::stringstream ss;
  write_csv(tr, ss);
  CHECK(ss.str().rfind("t,x1,x2,v1,v2\n", 0) == 0);
  const Trajectory back = read_csv(ss);
  REQUIRE(back.size() == tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(back.times()[i] == tr.times()[i]);
    CHECK(back.positions()[i] == tr.positions()[i]);
    CHECK(back.velocities()[i] == tr.velocities()[i]);
  }
  const auto meta = meta_json(tr);
  CHECK(meta["columns"].size() == 5);
  CHECK(meta["epsilon"] == 0.1);
}

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "hfavg/analysis.hpp"

using namespace hfavg;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Trajectory kepler_orbit(double angle = 0.0) {
  const TimePeriodicPotential p = kepler_potential(-1.0, 0.1);
  const Vec x0 = vec2(std::cos(angle), std::sin(angle));
  const Vec v0 = 1.2 * vec2(-std::sin(angle), std::cos(angle));
  return integrate_full(p, x0, v0, 0.08, 80.0, 16, 1);
}
}  // namespace

TEST_CASE("fit_order on synthetic data") {
  const std::vector<double> eps{1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512};
  std::vector<double> e4, e2;
  for (double e : eps) {
    e4.push_back(std::pow(e, 4));
    e2.push_back(3 * e * e);
  }
  const OrderFit f4 = fit_order(eps, e4);
  CHECK(std::abs(f4.slope - 4.0) < 1e-12);
  CHECK(f4.residual < 1e-12);
  CHECK(fit_order(eps, e2).slope == doctest::Approx(2.0).epsilon(1e-12));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> noisy;
    for (double e : eps) noisy.push_back(std::pow(e, 4) * (1.0 + noise(rng)));
    const double s = fit_order(eps, noisy).slope;
    CHECK(s >= 3.8);
    CHECK(s <= 4.2);
  }
}

TEST_CASE("fit_order rejects degenerate input") {
  CHECK_THROWS_AS(fit_order({0.1, 0.2, 0.3}, {1, 2, 3}), InvalidArgument);
  CHECK_THROWS_WITH_AS(fit_order({0.1, 0.1, 0.2, 0.3}, {1, 2, 3, 4}), doctest::Contains("repeated"), InvalidArgument);
  CHECK_THROWS_AS(fit_order({0.1, 0.2, 0.3, 0.4}, {1, 0, 3, 4}), InvalidArgument);
}

TEST_CASE("Kepler ellipse does not precess") {
  const PrecessionReport rep = measure_precession(kepler_orbit(), Vec::Zero(2));
  CHECK(rep.measurable);
  CHECK(rep.orbits >= 3);
  CHECK(std::abs(rep.precession_per_orbit) < 1e-6);
  CHECK(std::abs(rep.angles.front()) < 1e-4);
}

TEST_CASE("precession measurement is rotation equivariant") {
  const double alpha = 0.7;
  const PrecessionReport a = measure_precession(kepler_orbit(), Vec::Zero(2));
  const PrecessionReport b = measure_precession(kepler_orbit(alpha), Vec::Zero(2));
  REQUIRE(a.angles.size() == b.angles.size());
  for (std::size_t i = 0; i < a.angles.size(); ++i) CHECK(b.angles[i] - a.angles[i] == doctest::Approx(alpha).epsilon(1e-6));
  CHECK(b.precession_per_orbit == doctest::Approx(a.precession_per_orbit).epsilon(1e-6));
}

TEST_CASE("perturbed Kepler orbit precesses prograde") {
  const TimePeriodicPotential p(
      2, [](const Vec& x, double) { return -1 / x.norm() - 0.01 / std::pow(x.norm(), 3); });
  const Trajectory tr = integrate_full(p, vec2(1, 0), vec2(0, 1.2), 0.08, 80.0, 16, 1);
  CHECK(measure_precession(tr, Vec::Zero(2)).precession_per_orbit > 0.0);
}

TEST_CASE("precession input checks") {
  Trajectory circle(2);
  for (int i = 0; i < 400; ++i) {
    const double t = 0.05 * i;
    circle.append(t, vec2(std::cos(t), std::sin(t)), vec2(-std::sin(t), std::cos(t)));
  }
  const PrecessionReport rep = measure_precession(circle, Vec::Zero(2));
  CHECK_FALSE(rep.measurable);
  CHECK(rep.note.find("no precession measurable") != std::string::npos);

  Trajectory short_arc = kepler_orbit();
  Trajectory first(2);
  for (std::size_t i = 0; i < short_arc.size() && short_arc.times()[i] < 5.0; ++i) {
    first.append(short_arc.times()[i], short_arc.positions()[i], short_arc.velocities()[i]);
  }
  CHECK_THROWS_WITH_AS(measure_precession(first, Vec::Zero(2)), doctest::Contains("at least 3"), InvalidArgument);

  Trajectory spatial(3);
  spatial.append(0, Vec::Zero(3), Vec::Zero(3));
  CHECK_THROWS_AS(measure_precession(spatial, Vec::Zero(2)), InvalidArgument);
}

TEST_CASE("compare_guided") {
  const TimePeriodicPotential p = separable_potential(TrigPolynomial{1.0, {}, {}}, StaticShape::quartic, 2);
  const PeriodicFieldStack stack(p);
  const Trajectory full = integrate_full(p, vec2(0.5, 0.2), vec2(0, 0.3), 0.05, 2.0, 64, 4);
  const AveragedSystem sys = assemble(p, 0.05);

  SUBCASE("identical systems agree to integrator noise") {
    const Trajectory avg = integrate_averaged(sys, vec2(0.5, 0.2), vec2(0, 0.3), 2.0, 1e-3);
    CHECK(compare_guided(full, avg, stack, 0.05, AveragingOrder::standard) <= 1e-8);
  }
  SUBCASE("horizon mismatch") {
    const Trajectory avg = integrate_averaged(sys, vec2(0.5, 0.2), vec2(0, 0.3), 1.0, 1e-3);
    CHECK_THROWS_WITH_AS(compare_guided(full, avg, stack, 0.05, AveragingOrder::standard),
                         doctest::Contains("horizon"), InvalidArgument);
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(compare_guided(full, Trajectory(2), stack, 0.05, AveragingOrder::standard), InvalidArgument);
  }
}

TEST_CASE("output stride barely moves the error estimate") {
  ScenarioConfig cfg = find_scenario(default_catalog(), "custom")->defaults;
  const BuiltScenario b = build_scenario(cfg);
  const ConvergencePoint p8 = run_convergence_point(b, 1.0 / 64);
  cfg.output_stride = 4;
  const ConvergencePoint p4 = run_convergence_point(build_scenario(cfg), 1.0 / 64);
  CHECK(p4.error >= p8.error * (1 - 1e-6));
  CHECK(p4.error <= p8.error * 1.1);
}

TEST_CASE("convergence report output") {
  ScenarioConfig cfg = find_scenario(default_catalog(), "custom")->defaults;
  cfg.eps_ladder = {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
  cfg.t_end = 1.0;
  const ConvergenceReport rep = run_convergence(build_scenario(cfg), 2);
  CHECK(rep.fit.slope > 3.7);
  CHECK(rep.config_digest.size() == 64);
  const auto j = rep.to_json();
  CHECK(j["points"].size() == 4);
  std::ostringstream os;
  rep.write_csv(os);
  CHECK(os.str().rfind("eps,error\n", 0) == 0);
}

TEST_CASE("sha256 of a known string") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("parallel_for runs every index and reports failures") {
  std::vector<int> hits(50, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(8, 3, [](std::size_t i) { if (i == 5) throw std::runtime_error("x"); }),
                  std::runtime_error);
  (void)kTwoPi;
}

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hfavg/scenarios.hpp"

using namespace hfavg;

namespace {
Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("default catalog") {
  const ScenarioCatalog cat = default_catalog();
  REQUIRE(cat.size() == 5);
  const char* names[] = {"rotating_saddle", "oscillatory", "ruled_surface", "satellite", "custom"};
  for (int i = 0; i < 5; ++i) {
    CHECK(cat[i].name == names[i]);
    CHECK_NOTHROW(cat[i].defaults.validate());
    CHECK_NOTHROW(build_scenario(cat[i].defaults));
  }
  CHECK(find_scenario(cat, "nosuch") == nullptr);
}

TEST_CASE("number lists accept fractions") {
  const auto xs = parse_number_list("1/64, 1/128,0.5");
  REQUIRE(xs.size() == 3);
  CHECK(xs[0] == 1.0 / 64);
  CHECK(xs[1] == 1.0 / 128);
  CHECK(xs[2] == 0.5);
  CHECK_THROWS_AS(parse_number_list("1/0"), InvalidArgument);
  CHECK_THROWS_AS(parse_number_list("abc"), InvalidArgument);
}

TEST_CASE("config round trip is lossless") {
  for (const auto& e : default_catalog()) {
    ScenarioConfig cfg = e.defaults;
    cfg.eps_ladder = {0.1, 1.0 / 3, 1.0 / 7, 1e-5};
    cfg.t_end = 0.1 + 0.2;
    const ScenarioConfig back = ScenarioConfig::parse(cfg.serialize(), ScenarioConfig{});
    CHECK(back.to_kv() == cfg.to_kv());
    CHECK(back.eps_ladder == cfg.eps_ladder);
    CHECK(back.t_end == cfg.t_end);
  }
}

TEST_CASE("config validation names the problem") {
  ScenarioConfig cfg = default_catalog()[0].defaults;
  cfg.eps_ladder = {0.1, 0.1, 0.05, 0.01};
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("distinct"), InvalidArgument);
  cfg.eps_ladder = {0.1, 0.05, 0.01};
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("at least 4"), InvalidArgument);
  cfg.eps_ladder = {0.1, -0.05, 0.01, 0.02};
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("positive"), InvalidArgument);
  CHECK_THROWS_WITH_AS(cfg.set("nosuch", "1"), doctest::Contains("nosuch"), InvalidArgument);
  CHECK_THROWS_WITH_AS(cfg.set("steps_per_period", "12x"), doctest::Contains("steps_per_period"), InvalidArgument);
}

TEST_CASE("satellite oracle values") {
  for (double sign : {-1.0, 1.0}) {
    const SatelliteScenario s = satellite(sign, 0.5);
    CHECK(s.ubar1(vec2(2, 0)) == doctest::Approx(sign / 16));
    CHECK(s.mean_vgrad_sq(vec2(1, 0)) == doctest::Approx(3.65625));
    CHECK((s.b(vec2(0, 1)) - vec2(5.34375, 0)).norm() < 1e-15);
  }
}

TEST_CASE("oscillatory oracle") {
  const TrigPolynomial a{1.0, {1.0}, {}};
  const OscillatoryScenario s = oscillatory(a, StaticShape::harmonic, 2);
  CHECK(s.v_mean_square == doctest::Approx(1.0 / (8 * std::numbers::pi * std::numbers::pi)).epsilon(1e-14));
  const BuiltScenario b = build_scenario(find_scenario(default_catalog(), "oscillatory")->defaults);
  const AveragedSystem sys = b.assemble(0.05);
  const Vec x = vec2(0.4, -0.7), v = vec2(1, 1);
  CHECK((sys.acceleration(x, v) - b.oracle(x, v, 0.05)).norm() < 1e-12);
}

TEST_CASE("vibrating-pivot stabilization flips at the threshold") {
  const double eps = 0.05;
  auto stable = [&](double abar) {
    // inverted shape: u = -|x|^2/2; linearized averaged force is -k x with
    // k = -abar + eps^2 avg(v^2)
    const OscillatoryScenario s = oscillatory(TrigPolynomial{abar, {20.0}, {}}, StaticShape::inverted, 2);
    const Vec x = vec2(1e-3, 0);
    return s.averaged_acceleration(x, eps)[0] < 0.0;
  };
  const OscillatoryScenario ref = oscillatory(TrigPolynomial{0.0, {20.0}, {}}, StaticShape::inverted, 2);
  const double threshold = ref.stabilization_threshold(eps);
  CHECK(threshold > 0.0);
  CHECK(stable(0.5 * threshold));
  CHECK_FALSE(stable(2.0 * threshold));
}

TEST_CASE("ruled surface constants") {
  const RuledSurfaceScenario c = ruled_surface(TrigPolynomial{0.8, {}, {}}, 0.5);
  CHECK(c.quoted_hbar() == doctest::Approx(0.4));
  const RuledSurfaceScenario s = ruled_surface(TrigPolynomial{0.3, {1.0}, {}}, 0.5);
  CHECK(s.field_strength(1.0) == doctest::Approx(2.0));
  CHECK(s.field_strength(2.0) == doctest::Approx(2.0 / 16));
}

TEST_CASE("rotating saddle oracle at rest") {
  const RotatingSaddleScenario s = rotating_saddle();
  const double eps = 1.0 / 128;
  CHECK((s.quoted_acceleration(vec2(1, 0), vec2(0, 0), eps) - vec2(-eps * eps, 0)).norm() < 1e-18);
  CHECK((s.averaged_acceleration(vec2(1, 0), vec2(0, 0), eps) - vec2(-eps * eps, 0)).norm() < 1e-18);
}

TEST_CASE("custom potential dimension check") {
  ScenarioConfig cfg = find_scenario(default_catalog(), "custom")->defaults;
  cfg.terms = "1:2,1,1:cos:1";
  CHECK_THROWS_WITH_AS(build_scenario(cfg), doctest::Contains("dimension"), InvalidArgument);
}

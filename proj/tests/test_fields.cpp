#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "hfavg/fields.hpp"

using namespace hfavg;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

TimePeriodicPotential value_only() {
  return TimePeriodicPotential(2, [](const Vec& x, double tau) {
    return std::cos(kTwoPi * tau) * (x[0] * x[0] * x[0] + x[0] * x[1] * x[1]);
  });
}
}  // namespace

TEST_CASE("sampled trig polynomial is reproduced exactly") {
  auto f = [](double t) { return 0.5 + std::cos(kTwoPi * t) - 0.25 * std::sin(3 * kTwoPi * t); };
  const FourierSeries s = sample_fourier(f, 33);
  CHECK(s.num_modes() == 16);
  CHECK(s.mean() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(s.coeff(1) - Complex(0.5, 0.0)) < 1e-15);
  CHECK(std::abs(s.coeff(3) - Complex(0.0, 0.125)) < 1e-15);
  CHECK(s.is_real(1e-14));
  for (double t : {0.0, 0.123, 0.5, 0.987}) CHECK(s(t) == doctest::Approx(f(t)).epsilon(1e-14));
  const auto ph = phasors(0.37, s.num_modes());
  CHECK(s.evaluate(ph) == doctest::Approx(f(0.37)).epsilon(1e-14));
}

TEST_CASE("zero-mean antiderivative") {
  SUBCASE("cos 2 pi tau integrates to sin 2 pi tau / 2 pi") {
    const FourierSeries s = sample_fourier([](double t) { return std::cos(kTwoPi * t); }, 17);
    const FourierSeries a = zero_mean_antiderivative(s);
    for (double t : {0.1, 0.3, 0.8}) {
      CHECK(a(t) == doctest::Approx(std::sin(kTwoPi * t) / kTwoPi).epsilon(1e-14));
    }
    CHECK(std::abs(a.mean()) < 1e-17);
  }
  SUBCASE("derivative undoes it") {
    const FourierSeries s = sample_fourier(
        [](double t) { return std::sin(kTwoPi * t) - 0.4 * std::cos(5 * kTwoPi * t); }, 33);
    const FourierSeries back = zero_mean_antiderivative(s).derivative();
    for (int k = -16; k <= 16; ++k) CHECK(std::abs(back.coeff(k) - s.coeff(k)) <= 1e-12);
  }
  SUBCASE("nonzero mean is rejected") {
    const FourierSeries s = sample_fourier([](double t) { return 1.0 + std::cos(kTwoPi * t); }, 9);
    CHECK_THROWS_WITH_AS(zero_mean_antiderivative(s), doctest::Contains("nonzero mean"),
                         InvalidArgument);
    CHECK_NOTHROW(zero_mean_antiderivative(s.without_mean()));
  }
}

TEST_CASE("time averages") {
  CHECK(time_average([](double t) { return std::pow(std::cos(kTwoPi * t), 2); }, 16) ==
        doctest::Approx(0.5).epsilon(1e-15));
  const FourierSeries a = sample_fourier([](double t) { return std::cos(kTwoPi * t); }, 9);
  const FourierSeries b = sample_fourier([](double t) { return 3 * std::cos(kTwoPi * t) + 1; }, 9);
  CHECK(mean_product(a, b) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("non-finite samples name the phase") {
  auto f = [](double t) { return t > 0.4 && t < 0.6 ? std::numeric_limits<double>::quiet_NaN() : 1.0; };
  CHECK_THROWS_WITH_AS(sample_fourier(f, 9), doctest::Contains("tau"), NonFiniteError);
}

TEST_CASE("phase is wrapped into one period") {
  const TimePeriodicPotential p = value_only();
  const Vec x = vec2(0.3, -0.2);
  CHECK(p.value(x, 1.25) == doctest::Approx(p.value(x, 0.25)).epsilon(1e-14));
  CHECK(p.value(x, -0.75) == doctest::Approx(p.value(x, 0.25)).epsilon(1e-13));
}

TEST_CASE("finite-difference fallbacks agree with analytic derivatives") {
  const TimePeriodicPotential p = value_only();
  const Vec x = vec2(0.7, -0.4);
  const double tau = 0.2, c = std::cos(kTwoPi * tau);
  const Vec g = c * vec2(3 * x[0] * x[0] + x[1] * x[1], 2 * x[0] * x[1]);
  Mat h(2, 2);
  h << 6 * x[0], 2 * x[1], 2 * x[1], 2 * x[0];
  h *= c;
  CHECK((p.gradient(x, tau) - g).norm() < 1e-9);
  CHECK((p.hessian(x, tau) - h).norm() < 1e-6);
  const double e1 = (fd_gradient(p, x, tau, 1e-2) - g).norm();
  const double e2 = (fd_gradient(p, x, tau, 5e-3) - g).norm();
  CHECK(std::log2(e1 / e2) >= 1.9);
  CHECK_THROWS_AS(fd_gradient(p, x, tau, 0.0), InvalidArgument);
}

TEST_CASE("validity region") {
  const ValidityRegion r{0.5};
  CHECK(r.contains(vec2(1, 0)));
  CHECK_FALSE(r.contains(vec2(0.1, 0.1)));
  const TimePeriodicPotential p = value_only().with_region(r);
  CHECK_THROWS_AS(p.require_valid(vec2(0.1, 0)), DomainError);
  CHECK_THROWS_AS(p.require_valid(Vec::Zero(3)), InvalidArgument);
}

TEST_CASE("order-1 composite") {
  const TimePeriodicPotential u0(2, [](const Vec& x, double) { return x.squaredNorm(); });
  const TimePeriodicPotential u1 = value_only();
  const Order1Potential p{u0, u1};
  const Vec x = vec2(0.4, 0.1);
  CHECK(p.value(x, 0.3, 0.01) == doctest::Approx(u0.value(x, 0) + 0.01 * u1.value(x, 0.3)));
  CHECK(p.composite(0.01).value(x, 0.3) == doctest::Approx(p.value(x, 0.3, 0.01)));
}

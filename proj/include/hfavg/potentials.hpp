#pragma once

#include <string>
#include <vector>

#include "hfavg/fields.hpp"

namespace hfavg {

/// h(phi) = c0 + sum_k (cos[k-1] cos(k phi) + sin[k-1] sin(k phi)), 2 pi periodic.
struct TrigPolynomial {
  double c0 = 0.0;
  std::vector<double> cos;
  std::vector<double> sin;

  double value(double phi) const;
  double derivative(double phi) const;
  double second_derivative(double phi) const;
  double mean() const { return c0; }
  /// Mean of (h - mean)^2 over a period.
  double variance() const;
  /// Mean square of the zero-mean antiderivative in phi.
  double antiderivative_mean_square() const;
  /// (1/2pi) * integral of h over [0, upper].
  double partial_integral(double upper) const;
  int degree() const;
};

/// Static shapes u(x) for separable potentials a(tau) u(x).
enum class StaticShape { harmonic, inverted, quartic, pendulum };

StaticShape parse_static_shape(const std::string& name);
const char* to_string(StaticShape shape);
double shape_value(StaticShape shape, const Vec& x);
Vec shape_gradient(StaticShape shape, const Vec& x);
Mat shape_hessian(StaticShape shape, const Vec& x);

/// (x1^2 - x2^2)/2 rotated counterclockwise by angle pi*tau, i.e.
/// U = x^T Q(2 pi tau) x / 2 with the reflection-rotation
/// Q(phi) = [[cos phi, sin phi], [sin phi, -cos phi]].
TimePeriodicPotential rotating_saddle_potential();

/// a(2 pi tau) * u(x).
TimePeriodicPotential separable_potential(const TrigPolynomial& a, StaticShape u, int dim);

/// h(theta - 2 pi tau), theta the polar angle; valid for |x| >= r_min.
TimePeriodicPotential ruled_surface_potential(const TrigPolynomial& h, double r_min);

/// sign / |x| (time independent), valid for |x| >= r_min.
TimePeriodicPotential kepler_potential(double sign, double r_min, double scale = 1.0);

/// scale * sign * <U''(x) u, u> for U = 1/|x| and u = (cos 2 pi tau, sin 2 pi tau).
TimePeriodicPotential tidal_potential(double sign, double r_min, double scale = 1.0);

/// Monomial x1^p1 ... xn^pn times a temporal factor.
struct PolynomialTerm {
  enum class Temporal { constant, cosine, sine };
  double coeff = 1.0;
  std::vector<int> powers;
  Temporal temporal = Temporal::constant;
  int harmonic = 0;
};

/// Parses "c:p1,p2,...:cos|sin|const:k" terms separated by ';'.
std::vector<PolynomialTerm> parse_polynomial_terms(const std::string& text);
std::string format_polynomial_terms(const std::vector<PolynomialTerm>& terms);
TimePeriodicPotential polynomial_potential(const std::vector<PolynomialTerm>& terms);

}  // namespace hfavg

#include "hfavg/potentials.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace hfavg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, delim)) out.push_back(item);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double TrigPolynomial::value(double phi) const {
  double s = c0;
  for (std::size_t k = 0; k < cos.size(); ++k) s += cos[k] * std::cos((k + 1) * phi);
  for (std::size_t k = 0; k < sin.size(); ++k) s += sin[k] * std::sin((k + 1) * phi);
  return s;
}

double TrigPolynomial::derivative(double phi) const {
  double s = 0.0;
  for (std::size_t k = 0; k < cos.size(); ++k) s -= (k + 1) * cos[k] * std::sin((k + 1) * phi);
  for (std::size_t k = 0; k < sin.size(); ++k) s += (k + 1) * sin[k] * std::cos((k + 1) * phi);
  return s;
}

double TrigPolynomial::second_derivative(double phi) const {
  double s = 0.0;
  for (std::size_t k = 0; k < cos.size(); ++k) {
    s -= double((k + 1) * (k + 1)) * cos[k] * std::cos((k + 1) * phi);
  }
  for (std::size_t k = 0; k < sin.size(); ++k) {
    s -= double((k + 1) * (k + 1)) * sin[k] * std::sin((k + 1) * phi);
  }
  return s;
}

double TrigPolynomial::variance() const {
  double s = 0.0;
  for (double c : cos) s += 0.5 * c * c;
  for (double c : sin) s += 0.5 * c * c;
  return s;
}

double TrigPolynomial::antiderivative_mean_square() const {
  double s = 0.0;
  for (std::size_t k = 0; k < cos.size(); ++k) s += 0.5 * cos[k] * cos[k] / double((k + 1) * (k + 1));
  for (std::size_t k = 0; k < sin.size(); ++k) s += 0.5 * sin[k] * sin[k] / double((k + 1) * (k + 1));
  return s;
}

double TrigPolynomial::partial_integral(double upper) const {
  double s = c0 * upper;
  for (std::size_t k = 0; k < cos.size(); ++k) s += cos[k] * std::sin((k + 1) * upper) / (k + 1);
  for (std::size_t k = 0; k < sin.size(); ++k) {
    s += sin[k] * (1.0 - std::cos((k + 1) * upper)) / (k + 1);
  }
  return s / kTwoPi;
}

int TrigPolynomial::degree() const {
  return static_cast<int>(std::max(cos.size(), sin.size()));
}

StaticShape parse_static_shape(const std::string& name) {
  if (name == "harmonic") return StaticShape::harmonic;
  if (name == "inverted") return StaticShape::inverted;
  if (name == "quartic") return StaticShape::quartic;
  if (name == "pendulum") return StaticShape::pendulum;
  throw InvalidArgument("unknown static shape '" + name +
                        "' (expected harmonic, inverted, quartic, pendulum)");
}

const char* to_string(StaticShape shape) {
  switch (shape) {
    case StaticShape::harmonic: return "harmonic";
    case StaticShape::inverted: return "inverted";
    case StaticShape::quartic: return "quartic";
    case StaticShape::pendulum: return "pendulum";
  }
  return "?";
}

// harmonic |x|^2/2, inverted -|x|^2/2, quartic sum(x^2/2 + x^4/4), pendulum sum cos x.
double shape_value(StaticShape shape, const Vec& x) {
  switch (shape) {
    case StaticShape::harmonic: return 0.5 * x.squaredNorm();
    case StaticShape::inverted: return -0.5 * x.squaredNorm();
    case StaticShape::quartic: return (0.5 * x.array().square() + 0.25 * x.array().pow(4)).sum();
    case StaticShape::pendulum: return x.array().cos().sum();
  }
  return 0.0;
}

Vec shape_gradient(StaticShape shape, const Vec& x) {
  switch (shape) {
    case StaticShape::harmonic: return x;
    case StaticShape::inverted: return -x;
    case StaticShape::quartic: return (x.array() + x.array().cube()).matrix();
    case StaticShape::pendulum: return (-x.array().sin()).matrix();
  }
  return Vec::Zero(x.size());
}

Mat shape_hessian(StaticShape shape, const Vec& x) {
  const auto n = x.size();
  switch (shape) {
    case StaticShape::harmonic: return Mat::Identity(n, n);
    case StaticShape::inverted: return -Mat::Identity(n, n);
    case StaticShape::quartic: return (1.0 + 3.0 * x.array().square()).matrix().asDiagonal();
    case StaticShape::pendulum: return (-x.array().cos()).matrix().asDiagonal();
  }
  return Mat::Zero(n, n);
}

TimePeriodicPotential rotating_saddle_potential() {
  auto q = [](double tau) {
    const double c = std::cos(kTwoPi * tau);
    const double s = std::sin(kTwoPi * tau);
    Mat m(2, 2);
    m << c, s, s, -c;
    return m;
  };
  return TimePeriodicPotential(
      2, [q](const Vec& x, double tau) { return 0.5 * x.dot(q(tau) * x); },
      [q](const Vec& x, double tau) -> Vec { return q(tau) * x; },
      [q](const Vec&, double tau) -> Mat { return q(tau); }, {}, "rotating saddle");
}

TimePeriodicPotential separable_potential(const TrigPolynomial& a, StaticShape u, int dim) {
  return TimePeriodicPotential(
      dim, [a, u](const Vec& x, double tau) { return a.value(kTwoPi * tau) * shape_value(u, x); },
      [a, u](const Vec& x, double tau) -> Vec {
        return a.value(kTwoPi * tau) * shape_gradient(u, x);
      },
      [a, u](const Vec& x, double tau) -> Mat {
        return a.value(kTwoPi * tau) * shape_hessian(u, x);
      },
      {}, std::string("separable a(tau) u(x), u = ") + to_string(u));
}

TimePeriodicPotential ruled_surface_potential(const TrigPolynomial& h, double r_min) {
  auto phase = [](const Vec& x, double tau) { return std::atan2(x[1], x[0]) - kTwoPi * tau; };
  return TimePeriodicPotential(
      2, [h, phase](const Vec& x, double tau) { return h.value(phase(x, tau)); },
      [h, phase](const Vec& x, double tau) -> Vec {
        const double r2 = x.squaredNorm();
        return h.derivative(phase(x, tau)) * Eigen::Vector2d(-x[1] / r2, x[0] / r2);
      },
      [h, phase](const Vec& x, double tau) -> Mat {
        const double r2 = x.squaredNorm();
        const Eigen::Vector2d dtheta(-x[1] / r2, x[0] / r2);
        Mat d2theta(2, 2);
        d2theta << 2 * x[0] * x[1], x[1] * x[1] - x[0] * x[0], x[1] * x[1] - x[0] * x[0],
            -2 * x[0] * x[1];
        d2theta /= r2 * r2;
        const double phi = phase(x, tau);
        return h.second_derivative(phi) * dtheta * dtheta.transpose() + h.derivative(phi) * d2theta;
      },
      ValidityRegion{r_min}, "rotating ruled surface");
}

TimePeriodicPotential kepler_potential(double sign, double r_min, double scale) {
  const double k = sign * scale;
  return TimePeriodicPotential(
      2, [k](const Vec& x, double) { return k / x.norm(); },
      [k](const Vec& x, double) -> Vec { return -k * x / std::pow(x.norm(), 3); },
      [k](const Vec& x, double) -> Mat {
        const double r = x.norm();
        return k * (3.0 * x * x.transpose() - r * r * Mat::Identity(2, 2)) / std::pow(r, 5);
      },
      ValidityRegion{r_min}, "Kepler");
}

// Derivatives of 1/r contracted twice with the unit vector u, a = x . u:
//   <U'' u,u>          = (3a^2 - r^2) / r^5
//   d_k <U'' u,u>      = -15 a^2 x_k / r^7 + 3 (x_k + 2 a u_k) / r^5
//   d_kl <U'' u,u>     = 105 a^2 x_k x_l / r^9
//                        - 15 (x_k x_l + 2a (u_k x_l + x_k u_l) + a^2 d_kl) / r^7
//                        + 3 (d_kl + 2 u_k u_l) / r^5
TimePeriodicPotential tidal_potential(double sign, double r_min, double scale) {
  const double k = sign * scale;
  auto unit = [](double tau) { return Eigen::Vector2d(std::cos(kTwoPi * tau), std::sin(kTwoPi * tau)); };
  return TimePeriodicPotential(
      2,
      [k, unit](const Vec& x, double tau) {
        const double r = x.norm();
        const double a = x.dot(unit(tau));
        return k * (3 * a * a - r * r) / std::pow(r, 5);
      },
      [k, unit](const Vec& x, double tau) -> Vec {
        const Eigen::Vector2d u = unit(tau);
        const double r = x.norm();
        const double a = x.dot(u);
        return k * (-15 * a * a * x / std::pow(r, 7) + 3 * (x + 2 * a * u) / std::pow(r, 5));
      },
      [k, unit](const Vec& x, double tau) -> Mat {
        const Eigen::Vector2d u = unit(tau);
        const double r = x.norm();
        const double a = x.dot(u);
        const Mat id = Mat::Identity(2, 2);
        const Mat xx = x * x.transpose();
        const Mat ux = u * x.transpose();
        return k * (105 * a * a * xx / std::pow(r, 9) -
                    15 * (xx + 2 * a * (ux + ux.transpose()) + a * a * id) / std::pow(r, 7) +
                    3 * (id + 2 * u * u.transpose()) / std::pow(r, 5));
      },
      ValidityRegion{r_min}, "tidal quadrupole");
}

std::vector<PolynomialTerm> parse_polynomial_terms(const std::string& text) {
  std::vector<PolynomialTerm> terms;
  for (const auto& raw : split(text, ';')) {
    const std::string item = trim(raw);
    if (item.empty()) continue;
    const auto parts = split(item, ':');
    if (parts.size() != 4) {
      throw InvalidArgument("polynomial term '" + item + "' must read coeff:powers:cos|sin|const:k");
    }
    PolynomialTerm t;
    try {
      t.coeff = std::stod(trim(parts[0]));
      for (const auto& p : split(parts[1], ',')) t.powers.push_back(std::stoi(trim(p)));
      t.harmonic = std::stoi(trim(parts[3]));
    } catch (const std::logic_error&) {
      throw InvalidArgument("polynomial term '" + item + "' has a malformed number");
    }
    const std::string kind = trim(parts[2]);
    if (kind == "cos") {
      t.temporal = PolynomialTerm::Temporal::cosine;
    } else if (kind == "sin") {
      t.temporal = PolynomialTerm::Temporal::sine;
    } else if (kind == "const") {
      t.temporal = PolynomialTerm::Temporal::constant;
    } else {
      throw InvalidArgument("polynomial term '" + item + "' has unknown temporal factor " + kind);
    }
    for (int p : t.powers) {
      if (p < 0) throw InvalidArgument("negative power in polynomial term '" + item + "'");
    }
    terms.push_back(std::move(t));
  }
  if (terms.empty()) throw InvalidArgument("polynomial potential needs at least one term");
  const auto n = terms.front().powers.size();
  for (const auto& t : terms) {
    if (t.powers.size() != n) throw InvalidArgument("polynomial terms disagree on dimension");
  }
  return terms;
}

std::string format_polynomial_terms(const std::vector<PolynomialTerm>& terms) {
  std::string out;
  for (const auto& t : terms) {
    if (!out.empty()) out += ";";
    out += fmt(t.coeff) + ":";
    for (std::size_t i = 0; i < t.powers.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(t.powers[i]);
    }
    out += t.temporal == PolynomialTerm::Temporal::cosine ? ":cos:"
           : t.temporal == PolynomialTerm::Temporal::sine ? ":sin:"
                                                          : ":const:";
    out += std::to_string(t.harmonic);
  }
  return out;
}

namespace {

double temporal_factor(const PolynomialTerm& t, double tau) {
  switch (t.temporal) {
    case PolynomialTerm::Temporal::cosine: return std::cos(kTwoPi * t.harmonic * tau);
    case PolynomialTerm::Temporal::sine: return std::sin(kTwoPi * t.harmonic * tau);
    case PolynomialTerm::Temporal::constant: return 1.0;
  }
  return 1.0;
}

// d^m/dx^m of x^p.
double power_derivative(double x, int p, int m) {
  if (m > p) return 0.0;
  double c = 1.0;
  for (int i = 0; i < m; ++i) c *= (p - i);
  return c * std::pow(x, p - m);
}

// Derivative of the monomial with orders[i] derivatives in coordinate i.
double monomial_derivative(const PolynomialTerm& t, const Vec& x, const std::vector<int>& orders) {
  double v = t.coeff;
  for (std::size_t i = 0; i < t.powers.size(); ++i) v *= power_derivative(x[i], t.powers[i], orders[i]);
  return v;
}

}  // namespace

TimePeriodicPotential polynomial_potential(const std::vector<PolynomialTerm>& terms) {
  if (terms.empty()) throw InvalidArgument("polynomial potential needs at least one term");
  const int n = static_cast<int>(terms.front().powers.size());
  return TimePeriodicPotential(
      n,
      [terms, n](const Vec& x, double tau) {
        double s = 0.0;
        const std::vector<int> zero(n, 0);
        for (const auto& t : terms) s += temporal_factor(t, tau) * monomial_derivative(t, x, zero);
        return s;
      },
      [terms, n](const Vec& x, double tau) -> Vec {
        Vec g = Vec::Zero(n);
        std::vector<int> orders(n, 0);
        for (const auto& t : terms) {
          const double f = temporal_factor(t, tau);
          for (int i = 0; i < n; ++i) {
            orders[i] = 1;
            g[i] += f * monomial_derivative(t, x, orders);
            orders[i] = 0;
          }
        }
        return g;
      },
      [terms, n](const Vec& x, double tau) -> Mat {
        Mat h = Mat::Zero(n, n);
        std::vector<int> orders(n, 0);
        for (const auto& t : terms) {
          const double f = temporal_factor(t, tau);
          for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
              orders[i] += 1;
              orders[j] += 1;
              const double d = f * monomial_derivative(t, x, orders);
              orders[i] -= 1;
              orders[j] -= 1;
              h(i, j) += d;
              if (i != j) h(j, i) += d;
            }
          }
        }
        return h;
      },
      {}, "polynomial");
}

}  // namespace hfavg

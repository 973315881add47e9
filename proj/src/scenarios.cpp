#include "hfavg/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

namespace hfavg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Mat rotation_generator() {
  Mat j(2, 2);
  j << 0, -1, 1, 0;
  return j;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += fmt(xs[i]);
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

TrigPolynomial trig(double c0, std::vector<double> c, std::vector<double> s) {
  TrigPolynomial p;
  p.c0 = c0;
  p.cos = std::move(c);
  p.sin = std::move(s);
  return p;
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (trim(value.substr(pos)).empty()) return v;
  } catch (const std::logic_error&) {
  }
  throw InvalidArgument("invalid integer for '" + key + "': " + value);
}

}  // namespace

const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::rotating_saddle: return "rotating_saddle";
    case ScenarioKind::oscillatory: return "oscillatory";
    case ScenarioKind::ruled_surface: return "ruled_surface";
    case ScenarioKind::satellite: return "satellite";
    case ScenarioKind::custom: return "custom";
  }
  return "?";
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  for (auto k : {ScenarioKind::rotating_saddle, ScenarioKind::oscillatory,
                 ScenarioKind::ruled_surface, ScenarioKind::satellite, ScenarioKind::custom}) {
    if (name == to_string(k)) return k;
  }
  throw InvalidArgument("unknown potential kind '" + name + "'");
}

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw InvalidArgument("empty number");
  const auto slash = t.find('/');
  try {
    std::size_t pos = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(t, &pos);
      if (pos == t.size()) return v;
    } else {
      const std::string num = trim(t.substr(0, slash));
      const std::string den = trim(t.substr(slash + 1));
      std::size_t p1 = 0, p2 = 0;
      const double a = std::stod(num, &p1);
      const double b = std::stod(den, &p2);
      if (p1 == num.size() && p2 == den.size() && b != 0.0) return a / b;
    }
  } catch (const std::logic_error&) {
  }
  throw InvalidArgument("malformed number '" + t + "'");
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_number(item));
  }
  return out;
}

void ScenarioConfig::set(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  auto number = [&]() {
    try {
      return parse_number(value);
    } catch (const InvalidArgument&) {
      throw InvalidArgument("invalid number for '" + key + "': " + value);
    }
  };
  auto list = [&]() {
    try {
      return parse_number_list(value);
    } catch (const InvalidArgument&) {
      throw InvalidArgument("invalid number list for '" + key + "': " + value);
    }
  };
  if (key == "name") name = value;
  else if (key == "kind") kind = parse_scenario_kind(value);
  else if (key == "eps_ladder") eps_ladder = list();
  else if (key == "x0") x0 = list();
  else if (key == "v0") v0 = list();
  else if (key == "t_end") t_end = number();
  else if (key == "steps_per_period") steps_per_period = parse_int(key, value);
  else if (key == "output_stride") output_stride = parse_int(key, value);
  else if (key == "averaged_step") averaged_step = number();
  else if (key == "num_modes") num_modes = parse_int(key, value);
  else if (key == "out_dir") out_dir = value;
  else if (key == "seed") seed = static_cast<unsigned>(parse_int(key, value));
  else if (key == "sign") sign = number();
  else if (key == "r_min") r_min = number();
  else if (key == "orbits") orbits = number();
  else if (key == "dumbbell_eps") dumbbell_eps = number();
  else if (key == "orbit_x0") orbit_x0 = list();
  else if (key == "orbit_v0") orbit_v0 = list();
  else if (key == "a_mean") a_mean = number();
  else if (key == "a_cos") a_cos = list();
  else if (key == "a_sin") a_sin = list();
  else if (key == "u_shape") u_shape = value;
  else if (key == "dim") dim = parse_int(key, value);
  else if (key == "h_const") h_const = number();
  else if (key == "h_cos") h_cos = list();
  else if (key == "h_sin") h_sin = list();
  else if (key == "terms") terms = value;
  else throw InvalidArgument("unknown config key '" + key + "'");
}

std::map<std::string, std::string> ScenarioConfig::to_kv() const {
  return {
      {"name", name},
      {"kind", to_string(kind)},
      {"eps_ladder", fmt_list(eps_ladder)},
      {"x0", fmt_list(x0)},
      {"v0", fmt_list(v0)},
      {"t_end", fmt(t_end)},
      {"steps_per_period", std::to_string(steps_per_period)},
      {"output_stride", std::to_string(output_stride)},
      {"averaged_step", fmt(averaged_step)},
      {"num_modes", std::to_string(num_modes)},
      {"out_dir", out_dir},
      {"seed", std::to_string(seed)},
      {"sign", fmt(sign)},
      {"r_min", fmt(r_min)},
      {"orbits", fmt(orbits)},
      {"dumbbell_eps", fmt(dumbbell_eps)},
      {"orbit_x0", fmt_list(orbit_x0)},
      {"orbit_v0", fmt_list(orbit_v0)},
      {"a_mean", fmt(a_mean)},
      {"a_cos", fmt_list(a_cos)},
      {"a_sin", fmt_list(a_sin)},
      {"u_shape", u_shape},
      {"dim", std::to_string(dim)},
      {"h_const", fmt(h_const)},
      {"h_cos", fmt_list(h_cos)},
      {"h_sin", fmt_list(h_sin)},
      {"terms", terms},
  };
}

ScenarioConfig ScenarioConfig::from_kv(const std::map<std::string, std::string>& kv,
                                       const ScenarioConfig& base) {
  ScenarioConfig out = base;
  for (const auto& [k, v] : kv) out.set(k, v);
  return out;
}

std::string ScenarioConfig::serialize() const {
  std::string out;
  for (const auto& [k, v] : to_kv()) out += k + " = " + v + "\n";
  return out;
}

ScenarioConfig ScenarioConfig::parse(const std::string& text, const ScenarioConfig& base) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(lineno) + " lacks '='");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return from_kv(kv, base);
}

void ScenarioConfig::validate() const {
  if (eps_ladder.empty()) throw InvalidArgument("eps_ladder must not be empty");
  std::set<double> seen;
  for (double e : eps_ladder) {
    if (!(e > 0.0)) throw InvalidArgument("eps_ladder values must be positive");
    if (!seen.insert(e).second) throw InvalidArgument("eps_ladder values must be distinct");
  }
  if (eps_ladder.size() < 4) throw InvalidArgument("eps_ladder needs at least 4 values for a slope fit");
  if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
  if (steps_per_period < 16) throw InvalidArgument("steps_per_period must be at least 16");
  if (output_stride < 1) throw InvalidArgument("output_stride must be positive");
  if (!(averaged_step > 0.0)) throw InvalidArgument("averaged_step must be positive");
  if (num_modes < 1) throw InvalidArgument("num_modes must be positive");
  if (x0.size() != v0.size()) throw InvalidArgument("x0 and v0 must have the same dimension");
  if (kind == ScenarioKind::satellite && sign != 1.0 && sign != -1.0) {
    throw InvalidArgument("sign must be +1 or -1");
  }
  if (!(r_min >= 0.0)) throw InvalidArgument("r_min must be non-negative");
  if (!(orbits > 0.0)) throw InvalidArgument("orbits must be positive");
  if (!(dumbbell_eps > 0.0)) throw InvalidArgument("dumbbell_eps must be positive");
  if (kind == ScenarioKind::oscillatory) parse_static_shape(u_shape);
  if (kind == ScenarioKind::custom) parse_polynomial_terms(terms);
}

ScenarioCatalog default_catalog() {
  const std::vector<double> ladder{1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512};
  ScenarioCatalog cat;

  ScenarioConfig saddle;
  saddle.name = "rotating_saddle";
  saddle.kind = ScenarioKind::rotating_saddle;
  saddle.eps_ladder = ladder;
  saddle.x0 = {0.5, 0.25};
  saddle.v0 = {0.1, -0.2};
  saddle.steps_per_period = 256;
  saddle.averaged_step = 1e-2;
  cat.push_back({"rotating_saddle", "quadratic saddle rotating rapidly about its center",
                 "rotating saddle trap", saddle});

  ScenarioConfig osc;
  osc.name = "oscillatory";
  osc.kind = ScenarioKind::oscillatory;
  osc.eps_ladder = {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
  osc.x0 = {0.5, -0.3};
  osc.v0 = {0.1, 0.2};
  osc.averaged_step = 1e-3;
  cat.push_back({"oscillatory", "separable potential a(t/eps) u(x), no magnetic term",
                 "Paul trap / vibrating-pivot pendulum", osc});

  ScenarioConfig ruled;
  ruled.name = "ruled_surface";
  ruled.kind = ScenarioKind::ruled_surface;
  ruled.eps_ladder = {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
  ruled.x0 = {2.0, 0.0};
  ruled.v0 = {0.0, 0.3};
  ruled.averaged_step = 1e-2;
  cat.push_back({"ruled_surface", "potential h(theta - t/eps) rotating about a singular axis",
                 "rotating ruled surface", ruled});

  ScenarioConfig sat;
  sat.name = "satellite";
  sat.kind = ScenarioKind::satellite;
  sat.eps_ladder = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
  sat.x0 = {1.0, 0.0};
  sat.v0 = {0.0, 1.3};
  sat.averaged_step = 2e-3;
  cat.push_back({"satellite", "spinning dumbbell in a Kepler field, U0 + eps U1 form",
                 "tethered satellite", sat});

  ScenarioConfig custom;
  custom.name = "custom";
  custom.kind = ScenarioKind::custom;
  custom.eps_ladder = ladder;
  custom.x0 = {0.5, 0.3};
  custom.v0 = {0.1, 0.2};
  custom.averaged_step = 1e-2;
  cat.push_back({"custom", "user polynomial-in-x, trigonometric-in-tau potential",
                 "generic nonlinear potential", custom});
  return cat;
}

const ScenarioEntry* find_scenario(const ScenarioCatalog& catalog, const std::string& name) {
  for (const auto& e : catalog) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

// --- individual scenarios -------------------------------------------------

RotatingSaddleScenario rotating_saddle() { return {rotating_saddle_potential()}; }

Vec RotatingSaddleScenario::averaged_acceleration(const Vec& X, const Vec& V, double eps) const {
  return -eps * eps * X + 2.0 * std::pow(eps, 3) * (rotation_generator() * V);
}

Vec RotatingSaddleScenario::quoted_acceleration(const Vec& X, const Vec& V, double eps) const {
  return -eps * eps * X - 2.0 * std::pow(eps, 3) * (rotation_generator() * V);
}

Vec RotatingSaddleScenario::transform(const Vec& x, const Vec& v, double t, double eps) const {
  const double phi = t / eps;
  Mat q(2, 2);
  q << std::cos(phi), std::sin(phi), std::sin(phi), -std::cos(phi);
  return x - eps * eps * q * (x - 2.0 * eps * rotation_generator() * v);
}

OscillatoryScenario oscillatory(const TrigPolynomial& a, StaticShape u, int dim) {
  OscillatoryScenario s{separable_potential(a, u, dim), a, u, a.mean(),
                        a.antiderivative_mean_square() / (kTwoPi * kTwoPi)};
  return s;
}

Vec OscillatoryScenario::averaged_acceleration(const Vec& X, double eps) const {
  const Vec g = shape_gradient(shape, X);
  return -a_mean * g - eps * eps * v_mean_square * (shape_hessian(shape, X) * g);
}

double OscillatoryScenario::stabilization_threshold(double eps) const {
  return eps * eps * v_mean_square;
}

RuledSurfaceScenario ruled_surface(const TrigPolynomial& h, double r_min) {
  return {ruled_surface_potential(h, r_min), h};
}

Vec RuledSurfaceScenario::quoted_acceleration(const Vec& X, const Vec& V, double eps) const {
  return std::pow(eps, 3) * quoted_hbar() / std::pow(X.norm(), 3) * (rotation_generator() * V);
}

Vec RuledSurfaceScenario::averaged_acceleration(const Vec& X, const Vec& V, double eps) const {
  const double s2 = h.variance();
  const double r4 = std::pow(X.squaredNorm(), 2);
  return eps * eps * s2 * X / r4 - 2.0 * std::pow(eps, 3) * s2 / r4 * (rotation_generator() * V);
}

double RuledSurfaceScenario::field_strength(double r) const {
  return 4.0 * h.variance() / std::pow(r, 4);
}

SatelliteScenario satellite(double sign, double r_min) {
  Order1Potential p{kepler_potential(sign, r_min, 2.0), tidal_potential(sign, r_min, 1.0 / kTwoPi)};
  return {p, sign};
}

double SatelliteScenario::ubar1(const Vec& z) const { return sign / (2.0 * std::pow(z.norm(), 3)); }

double SatelliteScenario::mean_vgrad_sq(const Vec& z) const {
  return 117.0 / 32.0 / std::pow(z.norm(), 8);
}

Vec SatelliteScenario::b(const Vec& z) const {
  return 171.0 / 32.0 / std::pow(z.norm(), 10) * Eigen::Vector2d(z[1], -z[0]);
}

double SatelliteScenario::hamiltonian(const Vec& z, const Vec& p, double eps) const {
  const double r = z.norm();
  return 0.5 * p.squaredNorm() + 2.0 * sign / r + eps * sign / (2.0 * std::pow(r, 3)) +
         117.0 / 64.0 * std::pow(eps, 4) / std::pow(r, 8) - std::pow(eps, 5) * b(z).dot(p);
}

Vec SatelliteScenario::averaged_acceleration(const Vec& X, const Vec& V, double eps) const {
  const double r = X.norm();
  const double k = 171.0 / 32.0;
  const Vec kepler = 2.0 * sign * X / std::pow(r, 3);
  const Vec tidal = 1.5 * eps * sign * X / std::pow(r, 5);
  const Vec ponderomotive = std::pow(eps, 4) * (117.0 / 8.0) * X / std::pow(r, 10);
  const Vec magnetic = std::pow(eps, 5) * 8.0 * k / std::pow(r, 10) * Eigen::Vector2d(V[1], -V[0]);
  return kepler + tidal + ponderomotive + magnetic;
}

TimePeriodicPotential SatelliteScenario::ambient() const {
  return kepler_potential(sign, potential.u0.region().r_min * 0.5, 1.0);
}

// --- built scenarios -------------------------------------------------------

TimePeriodicPotential BuiltScenario::full_potential(double eps) const {
  if (order == AveragingOrder::standard) return fast;
  return Order1Potential{*u0, fast}.composite(lib_eps(eps));
}

AveragedSystem BuiltScenario::assemble(double eps) const {
  if (order == AveragingOrder::standard) {
    return hfavg::assemble(fast, lib_eps(eps), config.num_modes);
  }
  return hfavg::assemble(Order1Potential{*u0, fast}, lib_eps(eps), config.num_modes);
}

double BuiltScenario::to_scenario_w(double w_lib) const {
  const int power = order == AveragingOrder::standard ? 2 : 4;
  return w_lib * std::pow(phase_period, power);
}

double BuiltScenario::to_scenario_b() const {
  const int power = order == AveragingOrder::standard ? 3 : 5;
  return std::pow(phase_period, power);
}

BuiltScenario build_scenario(const ScenarioConfig& config) {
  config.validate();
  BuiltScenario out;
  out.config = config;
  switch (config.kind) {
    case ScenarioKind::rotating_saddle: {
      auto s = rotating_saddle();
      out.fast = s.potential;
      out.phase_period = s.phase_period;
      out.oracle = [s](const Vec& X, const Vec& V, double eps) {
        return s.averaged_acceleration(X, V, eps);
      };
      out.oracle_description = "X'' = -eps^2 X + 2 eps^3 J X'";
      break;
    }
    case ScenarioKind::oscillatory: {
      auto s = oscillatory(trig(config.a_mean, config.a_cos, config.a_sin),
                           parse_static_shape(config.u_shape), config.dim);
      out.fast = s.potential;
      out.oracle = [s](const Vec& X, const Vec&, double eps) {
        return s.averaged_acceleration(X, eps);
      };
      out.oracle_description = "X'' = -abar u' - eps^2 avg(v^2) u'' u'";
      break;
    }
    case ScenarioKind::ruled_surface: {
      auto s = ruled_surface(trig(config.h_const, config.h_cos, config.h_sin), config.r_min);
      out.fast = s.potential;
      out.phase_period = s.phase_period;
      out.oracle = [s](const Vec& X, const Vec& V, double eps) {
        return s.averaged_acceleration(X, V, eps);
      };
      out.oracle_description = "X'' = eps^2 s2 X/r^4 - 2 eps^3 s2 r^-4 J X'";
      break;
    }
    case ScenarioKind::satellite: {
      auto s = satellite(config.sign, config.r_min);
      out.order = AveragingOrder::order1;
      out.fast = s.potential.u1;
      out.u0 = s.potential.u0;
      out.phase_period = s.phase_period;
      out.oracle = [s](const Vec& X, const Vec& V, double eps) {
        return s.averaged_acceleration(X, V, eps);
      };
      out.oracle_description = "H = p^2/2 + 2s/r + eps s/(2r^3) + (117/64) eps^4 r^-8 - (171/32) eps^5 r^-10 (y,-x).p";
      break;
    }
    case ScenarioKind::custom: {
      out.fast = polynomial_potential(parse_polynomial_terms(config.terms));
      break;
    }
  }
  if (!config.x0.empty() && static_cast<int>(config.x0.size()) != out.fast.dim()) {
    throw InvalidArgument("x0 has dimension " + std::to_string(config.x0.size()) +
                          " but the potential has dimension " + std::to_string(out.fast.dim()));
  }
  return out;
}

}  // namespace hfavg

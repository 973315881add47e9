#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hfavg/averaging.hpp"
#include "hfavg/fields.hpp"
#include "hfavg/potentials.hpp"

namespace hfavg {

enum class ScenarioKind { rotating_saddle, oscillatory, ruled_surface, satellite, custom };

const char* to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& name);

/// Declarative description of one experiment. Epsilon values are in the
/// scenario's own variables; angle-type scenarios (phase period 2 pi) are
/// mapped to the library's unit phase period by lib_eps = 2 pi * eps.
struct ScenarioConfig {
  std::string name;
  ScenarioKind kind = ScenarioKind::custom;
  std::vector<double> eps_ladder;
  std::vector<double> x0;
  std::vector<double> v0;
  double t_end = 2.0;
  int steps_per_period = 128;
  int output_stride = 8;
  double averaged_step = 1e-3;
  int num_modes = kDefaultModes;
  std::string out_dir = "out";
  unsigned seed = 0;  // reserved

  double sign = -1.0;     // satellite: U = sign / r
  double r_min = 0.5;     // singular potentials
  double orbits = 12.0;   // satellite precession horizon
  double dumbbell_eps = 0.01;
  std::vector<double> orbit_x0{1.0, 0.0};
  std::vector<double> orbit_v0{0.0, 1.2};

  // oscillatory: a(tau) = a_mean + sum a_cos[k] cos(2 pi (k+1) tau) + a_sin[k] sin(...)
  double a_mean = 1.0;
  std::vector<double> a_cos{1.0};
  std::vector<double> a_sin;
  std::string u_shape = "harmonic";
  int dim = 2;

  // ruled surface: h(theta) = h_const + sum h_cos[k] cos((k+1) theta) + h_sin[k] sin(...)
  double h_const = 0.3;
  std::vector<double> h_cos{1.0};
  std::vector<double> h_sin;

  // custom polynomial potential, see parse_polynomial_terms
  std::string terms = "0.25:4,0:cos:1;1:1,1:cos:1";

  /// Throws InvalidArgument naming the offending key.
  void validate() const;
  std::map<std::string, std::string> to_kv() const;
  static ScenarioConfig from_kv(const std::map<std::string, std::string>& kv,
                                const ScenarioConfig& base);
  /// Applies one key=value override; throws InvalidArgument naming the key.
  void set(const std::string& key, const std::string& value);
  std::string serialize() const;
  static ScenarioConfig parse(const std::string& text, const ScenarioConfig& base);
};

/// Parses "1/64,1/128,0.01" style lists.
std::vector<double> parse_number_list(const std::string& text);
double parse_number(const std::string& text);

struct ScenarioEntry {
  std::string name;
  std::string description;
  std::string reference;  // physical model the scenario reproduces
  ScenarioConfig defaults;
};

using ScenarioCatalog = std::vector<ScenarioEntry>;

ScenarioCatalog default_catalog();
const ScenarioEntry* find_scenario(const ScenarioCatalog& catalog, const std::string& name);

/// Closed-form averaged acceleration in the scenario's variables.
using OracleAcceleration = std::function<Vec(const Vec& X, const Vec& V, double eps)>;

/// A configured scenario: potentials in library units plus closed-form oracles.
struct BuiltScenario {
  ScenarioConfig config;
  AveragingOrder order = AveragingOrder::standard;
  double phase_period = 1.0;
  /// U (standard) or U1 (order1), in library units.
  TimePeriodicPotential fast;
  std::optional<TimePeriodicPotential> u0;
  OracleAcceleration oracle;
  std::string oracle_description;

  double lib_eps(double eps) const { return phase_period * eps; }
  TimePeriodicPotential full_potential(double eps) const;
  AveragedSystem assemble(double eps) const;
  const ValidityRegion& region() const { return fast.region(); }
  /// Scale factors turning library-unit averages into scenario units.
  double to_scenario_w(double w_lib) const;
  double to_scenario_b() const;
};

BuiltScenario build_scenario(const ScenarioConfig& config);

// Individual scenario constructors, each paired with its closed-form data.

struct RotatingSaddleScenario {
  TimePeriodicPotential potential;  // library units
  double phase_period = 2.0 * 3.14159265358979323846;
  /// X'' = -eps^2 X + 2 eps^3 J X' (as produced by B = (b')^T - b').
  Vec averaged_acceleration(const Vec& X, const Vec& V, double eps) const;
  /// X'' = -eps^2 X - 2 eps^3 J X' (the commonly quoted form, opposite magnetic sign).
  Vec quoted_acceleration(const Vec& X, const Vec& V, double eps) const;
  /// X = x - eps^2 Q(t/eps)(x - 2 eps J v).
  Vec transform(const Vec& x, const Vec& v, double t, double eps) const;
};
RotatingSaddleScenario rotating_saddle();

struct OscillatoryScenario {
  TimePeriodicPotential potential;
  TrigPolynomial a;
  StaticShape shape;
  double a_mean;
  double v_mean_square;  // avg(v^2), v the zero-mean antiderivative of a
  Vec averaged_acceleration(const Vec& X, double eps) const;
  /// a_mean below which the inverted equilibrium is stabilized.
  double stabilization_threshold(double eps) const;
};
OscillatoryScenario oscillatory(const TrigPolynomial& a, StaticShape u, int dim);

struct RuledSurfaceScenario {
  TimePeriodicPotential potential;
  TrigPolynomial h;
  double phase_period = 2.0 * 3.14159265358979323846;
  /// (1/2pi) int_0^pi h, the constant of the quoted inverse-cube law.
  double quoted_hbar() const { return h.partial_integral(3.14159265358979323846); }
  /// Quoted law X'' = eps^3 hbar |X|^-3 J X'.
  Vec quoted_acceleration(const Vec& X, const Vec& V, double eps) const;
  /// Closed form of the averaged law for h(theta - tau), sigma2 = avg((h - hbar)^2):
  ///   W = sigma2 / (2 r^2),  b = sigma2 (y, -x) / r^4,  B = -(2 sigma2 / r^4) J.
  Vec averaged_acceleration(const Vec& X, const Vec& V, double eps) const;
  double field_strength(double r) const;
};
RuledSurfaceScenario ruled_surface(const TrigPolynomial& h, double r_min);

struct SatelliteScenario {
  Order1Potential potential;  // library units
  double sign;
  double phase_period = 2.0 * 3.14159265358979323846;
  double ubar1(const Vec& z) const;             // sign / (2 r^3)
  double mean_vgrad_sq(const Vec& z) const;     // 117 / (32 r^8)
  Vec b(const Vec& z) const;                    // (171/32) r^-10 (y, -x)
  /// Averaged Hamiltonian
  /// p^2/2 + 2 sign/r + eps sign/(2r^3) + (117/64) eps^4/r^8 - (171/32) eps^5 r^-10 (y,-x).p
  double hamiltonian(const Vec& z, const Vec& p, double eps) const;
  Vec averaged_acceleration(const Vec& X, const Vec& V, double eps) const;
  /// Ambient field for the two-mass model.
  TimePeriodicPotential ambient() const;
};
SatelliteScenario satellite(double sign, double r_min);

}  // namespace hfavg

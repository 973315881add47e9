#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hfavg/averaging.hpp"
#include "hfavg/dynamics.hpp"
#include "hfavg/scenarios.hpp"

namespace hfavg {

/// sup_t |X(x(t), x'(t), t) - X_avg(t)| over the full trajectory's samples.
/// The averaged trajectory is Hermite-interpolated at those times. Both
/// trajectories must end at the same time (relative tolerance 1e-9).
double compare_guided(const Trajectory& full, const Trajectory& averaged,
                      const PeriodicFieldStack& stack, double eps, AveragingOrder order);

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log-residuals
};

/// Least-squares slope of log(error) against log(eps).
OrderFit fit_order(const std::vector<double>& eps, const std::vector<double>& errors);

struct PrecessionReport {
  std::vector<double> times;   // radial minima
  std::vector<double> angles;  // perihelion angles, unwrapped
  double precession_per_orbit = 0.0;
  int orbits = 0;
  bool measurable = true;
  std::string note;

  nlohmann::json to_json() const;
};

/// Perihelion angles from three-point parabolic refinement of r(t) minima.
/// Throws InvalidArgument for non-planar input or fewer than three minima;
/// circular orbits come back with measurable = false.
PrecessionReport measure_precession(const Trajectory& traj, const Vec& center);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& data);

struct ConvergencePoint {
  double eps = 0.0;       // scenario units
  double lib_eps = 0.0;   // library units
  double error = 0.0;
  double shooting_residual = 0.0;
  bool exited_region = false;
  Trajectory full;        // thinned
  Trajectory averaged;
};

struct ConvergenceReport {
  std::string scenario;
  AveragingOrder order = AveragingOrder::standard;
  double t_end = 0.0;
  std::vector<ConvergencePoint> points;
  OrderFit fit;
  std::string config_digest;

  std::vector<double> eps() const;
  std::vector<double> errors() const;
  nlohmann::json to_json() const;
  void write_csv(std::ostream& os) const;
};

/// Averaged start matched to a full start (x0, v0): X0 is the guiding center
/// of (x0, v0) and V0 is chosen by Newton shooting so that the averaged
/// trajectory hits the guiding center of the full trajectory at t_end.
struct MatchedStart {
  Vec X0;
  Vec V0;
  double residual = 0.0;
  int iterations = 0;
};
MatchedStart match_averaged_start(const AveragedSystem& system, const Trajectory& full,
                                  double t_end, double h);

/// Runs one ladder point of the convergence protocol.
ConvergencePoint run_convergence_point(const BuiltScenario& scenario, double eps);

/// Runs f(0..n-1) on up to `jobs` threads; exceptions are rethrown in index order.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f);

ConvergenceReport run_convergence(const BuiltScenario& scenario, int jobs = 1);

struct PrecessionComparison {
  PrecessionReport dumbbell;
  PrecessionReport averaged;
  PrecessionReport kepler;
  DumbbellTrajectory dumbbell_traj;
  Trajectory averaged_traj;
  Trajectory kepler_traj;
  double spin_drift = 0.0;         // max |theta' - theta'_0| / theta'_0
  double momentum_drift = 0.0;     // relative, total angular momentum

  bool same_sign() const;
  nlohmann::json to_json() const;
};

/// Exact dumbbell vs the averaged satellite model vs a pure Kepler control,
/// over config.orbits orbits started from orbit_x0 / orbit_v0.
PrecessionComparison run_precession(const BuiltScenario& satellite);

}  // namespace hfavg

#include "hfavg/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <thread>

#include <openssl/evp.h>

namespace hfavg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  return a <= -std::numbers::pi ? a + kTwoPi : a;
}

nlohmann::json vec_json(const std::vector<double>& xs) { return nlohmann::json(xs); }

}  // namespace

double compare_guided(const Trajectory& full, const Trajectory& averaged,
                      const PeriodicFieldStack& stack, double eps, AveragingOrder order) {
  if (full.empty() || averaged.empty()) throw InvalidArgument("empty trajectory");
  if (full.dim() != averaged.dim()) throw InvalidArgument("trajectory dimensions differ");
  const double horizon = std::max(std::abs(full.back_time()), std::abs(averaged.back_time()));
  const double tol = 1e-9 * std::max(1.0, horizon);
  if (std::abs(full.back_time() - averaged.back_time()) > tol ||
      std::abs(full.front_time() - averaged.front_time()) > tol) {
    throw InvalidArgument("horizon mismatch between full and averaged trajectories");
  }
  double err = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < full.size(); ++i) {
    const double t = full.times()[i];
    if (t < averaged.front_time() - tol || t > averaged.back_time() + tol) continue;
    const Vec X = guiding_center(stack, full.positions()[i], full.velocities()[i], t, eps, order);
    err = std::max(err, (X - averaged.position_at(t)).norm());
    ++used;
  }
  if (used == 0) throw InvalidArgument("trajectories have no overlapping samples");
  return err;
}

OrderFit fit_order(const std::vector<double>& eps, const std::vector<double>& errors) {
  if (eps.size() != errors.size()) throw InvalidArgument("eps and error counts differ");
  if (eps.size() < 4) throw InvalidArgument("order fit needs at least 4 points");
  std::set<double> seen;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !(errors[i] > 0.0)) {
      throw InvalidArgument("order fit needs positive eps and errors");
    }
    if (!seen.insert(eps[i]).second) throw InvalidArgument("degenerate ladder: repeated eps");
  }
  const std::size_t n = eps.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(eps[i]);
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(eps[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - my);
  }
  OrderFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::log(errors[i]) - fit.intercept - fit.slope * std::log(eps[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

nlohmann::json PrecessionReport::to_json() const {
  return {{"minima_times", vec_json(times)},
          {"perihelion_angles", vec_json(angles)},
          {"precession_per_orbit", precession_per_orbit},
          {"orbits", orbits},
          {"measurable", measurable},
          {"note", note}};
}

PrecessionReport measure_precession(const Trajectory& traj, const Vec& center) {
  if (traj.dim() != 2 || center.size() != 2) {
    throw InvalidArgument("precession measurement needs a planar trajectory");
  }
  const std::size_t n = traj.size();
  std::vector<double> r(n);
  double r_lo = INFINITY, r_hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = (traj.positions()[i] - center).norm();
    r_lo = std::min(r_lo, r[i]);
    r_hi = std::max(r_hi, r[i]);
  }
  PrecessionReport rep;
  if (n >= 3 && r_hi - r_lo <= 1e-9 * std::max(1.0, r_hi)) {
    rep.measurable = false;
    rep.note = "no precession measurable: orbit is circular";
    return rep;
  }
  const auto& t = traj.times();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(r[i] < r[i - 1] && r[i] <= r[i + 1])) continue;
    // Vertex of the parabola through the three samples.
    const double t0 = t[i - 1], t1 = t[i], t2 = t[i + 1];
    const double d1 = (r[i] - r[i - 1]) / (t1 - t0);
    const double d2 = (r[i + 1] - r[i]) / (t2 - t1);
    const double curv = (d2 - d1) / (t2 - t0);
    double tm = t1;
    if (curv > 0.0) tm = 0.5 * (t0 + t1) - d1 / (2.0 * curv);
    tm = std::clamp(tm, t0, t2);
    const Vec p = traj.position_at(tm) - center;
    double angle = std::atan2(p[1], p[0]);
    if (!rep.angles.empty()) angle = rep.angles.back() + wrap_angle(angle - rep.angles.back());
    rep.times.push_back(tm);
    rep.angles.push_back(angle);
  }
  if (rep.angles.size() < 3) {
    throw InvalidArgument("precession measurement needs at least 3 radial minima, found " +
                          std::to_string(rep.angles.size()));
  }
  rep.orbits = static_cast<int>(rep.angles.size()) - 1;
  rep.precession_per_orbit = (rep.angles.back() - rep.angles.front()) / rep.orbits;
  return rep;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    out += buf;
  }
  return out;
}

std::vector<double> ConvergenceReport::eps() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.eps);
  return out;
}

std::vector<double> ConvergenceReport::errors() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.error);
  return out;
}

nlohmann::json ConvergenceReport::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    pts.push_back({{"eps", p.eps},
                   {"lib_eps", p.lib_eps},
                   {"error", p.error},
                   {"shooting_residual", p.shooting_residual},
                   {"exited_region", p.exited_region}});
  }
  return {{"scenario", scenario},
          {"order", to_string(order)},
          {"t_end", t_end},
          {"points", pts},
          {"slope", fit.slope},
          {"intercept", fit.intercept},
          {"residual", fit.residual},
          {"config_digest", config_digest}};
}

void ConvergenceReport::write_csv(std::ostream& os) const {
  os << "eps,error\n";
  char buf[80];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.eps, p.error);
    os << buf;
  }
}

MatchedStart match_averaged_start(const AveragedSystem& system, const Trajectory& full,
                                  double t_end, double h) {
  if (full.empty()) throw InvalidArgument("empty full trajectory");
  const double tol = 1e-9 * std::max(1.0, t_end);
  if (std::abs(full.back_time() - t_end) > tol) {
    throw InvalidArgument("full trajectory does not reach t_end");
  }
  const PeriodicFieldStack& stack = system.stack();
  const double eps = system.epsilon();
  const AveragingOrder order = system.order();
  const int n = system.dim();

  MatchedStart m;
  m.X0 = guiding_center(stack, full.positions().front(), full.velocities().front(), 0.0, eps,
                        order);
  m.V0 = guiding_center_velocity(stack, full.positions().front(), full.velocities().front(), 0.0,
                                 eps, order);
  const Vec target = guiding_center(stack, full.positions().back(), full.velocities().back(),
                                    full.back_time(), eps, order);

  const int endpoint_only = std::numeric_limits<int>::max();
  auto shoot = [&](const Vec& V0) -> Vec {
    const Trajectory tr = integrate_averaged(system, m.X0, V0, t_end, h, endpoint_only);
    if (tr.meta.exited_region) throw DomainError("averaged shooting trajectory left the region");
    return tr.positions().back() - target;
  };

  Vec F = shoot(m.V0);
  Mat J(n, n);
  const double scale = 1.0 + target.norm();
  for (int j = 0; j < n; ++j) {
    const double d = 1e-6 * (1.0 + std::abs(m.V0[j]));
    Vec Vp = m.V0;
    Vp[j] += d;
    J.col(j) = (shoot(Vp) - F) / d;
  }
  const auto lu = J.partialPivLu();
  m.residual = F.norm();
  for (int it = 0; it < 8 && m.residual > 1e-15 * scale; ++it) {
    const Vec V = m.V0 - lu.solve(F);
    const Vec Fn = shoot(V);
    if (!(Fn.norm() < m.residual)) break;
    m.V0 = V;
    F = Fn;
    m.residual = F.norm();
    m.iterations = it + 1;
  }
  return m;
}

ConvergencePoint run_convergence_point(const BuiltScenario& scenario, double eps) {
  const ScenarioConfig& cfg = scenario.config;
  ConvergencePoint pt;
  pt.eps = eps;
  pt.lib_eps = scenario.lib_eps(eps);
  const Vec x0 = Eigen::Map<const Vec>(cfg.x0.data(), static_cast<Eigen::Index>(cfg.x0.size()));
  const Vec v0 = Eigen::Map<const Vec>(cfg.v0.data(), static_cast<Eigen::Index>(cfg.v0.size()));
  pt.full = integrate_full(scenario.full_potential(eps), x0, v0, pt.lib_eps, cfg.t_end,
                           cfg.steps_per_period, cfg.output_stride);
  if (pt.full.meta.exited_region) {
    pt.exited_region = true;
    throw DomainError("full trajectory left the validity region at t = " +
                      std::to_string(pt.full.meta.exit_time) + " for eps = " +
                      std::to_string(eps));
  }
  const AveragedSystem system = scenario.assemble(eps);
  const MatchedStart start = match_averaged_start(system, pt.full, cfg.t_end, cfg.averaged_step);
  pt.shooting_residual = start.residual;
  pt.averaged = integrate_averaged(system, start.X0, start.V0, cfg.t_end, cfg.averaged_step);
  if (pt.averaged.meta.exited_region) {
    pt.exited_region = true;
    throw DomainError("averaged trajectory left the validity region for eps = " +
                      std::to_string(eps));
  }
  pt.error = compare_guided(pt.full, pt.averaged, system.stack(), pt.lib_eps, scenario.order);
  return pt;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f) {
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            f(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ConvergenceReport run_convergence(const BuiltScenario& scenario, int jobs) {
  const ScenarioConfig& cfg = scenario.config;
  ConvergenceReport rep;
  rep.scenario = cfg.name;
  rep.order = scenario.order;
  rep.t_end = cfg.t_end;
  rep.config_digest = sha256_hex(cfg.serialize());
  rep.points.resize(cfg.eps_ladder.size());
  parallel_for(cfg.eps_ladder.size(), jobs, [&](std::size_t i) {
    rep.points[i] = run_convergence_point(scenario, cfg.eps_ladder[i]);
  });
  rep.fit = fit_order(rep.eps(), rep.errors());
  return rep;
}

bool PrecessionComparison::same_sign() const {
  if (!dumbbell.measurable || !averaged.measurable) return false;
  const double a = dumbbell.precession_per_orbit, b = averaged.precession_per_orbit;
  return a != 0.0 && b != 0.0 && std::signbit(a) == std::signbit(b);
}

nlohmann::json PrecessionComparison::to_json() const {
  return {{"dumbbell", dumbbell.to_json()},
          {"averaged", averaged.to_json()},
          {"kepler_control", kepler.to_json()},
          {"same_sign", same_sign()},
          {"spin_drift", spin_drift},
          {"angular_momentum_drift", momentum_drift}};
}

PrecessionComparison run_precession(const BuiltScenario& satellite) {
  if (satellite.order != AveragingOrder::order1 || !satellite.u0) {
    throw InvalidArgument("precession comparison needs the satellite scenario");
  }
  const ScenarioConfig& cfg = satellite.config;
  if (cfg.orbit_x0.size() != 2 || cfg.orbit_v0.size() != 2) {
    throw InvalidArgument("orbit_x0 and orbit_v0 must be planar");
  }
  const Eigen::Vector2d z0(cfg.orbit_x0[0], cfg.orbit_x0[1]);
  const Eigen::Vector2d w0(cfg.orbit_v0[0], cfg.orbit_v0[1]);
  // The two-mass model moves in sign/r; the averaged model in 2 sign/r. The
  // averaged start uses sqrt(2) times the velocity so both trace the same
  // Kepler ellipse, on time scales differing by sqrt(2).
  const double energy = 0.5 * w0.squaredNorm() + cfg.sign / z0.norm();
  if (cfg.sign > 0.0 || energy >= 0.0) {
    throw InvalidArgument("orbit_x0 / orbit_v0 do not give a bound orbit (sign = " +
                          std::to_string(cfg.sign) + ")");
  }
  const double a = 1.0 / (2.0 * -energy);
  const double period = kTwoPi * std::pow(a, 1.5);
  const double span = cfg.orbits + 0.5;
  const double eps = cfg.dumbbell_eps;

  PrecessionComparison out;

  SatelliteScenario sat = hfavg::satellite(cfg.sign, cfg.r_min);
  DumbbellState s0;
  s0.z = z0;
  s0.zdot = w0;
  s0.theta = 0.0;
  s0.theta_dot = 1.0 / eps;
  const double h_db = std::min(kTwoPi * eps / 64.0, period / 2048.0);
  out.dumbbell_traj = integrate_dumbbell(sat.ambient(), s0, eps, span * period, h_db, 8);
  const Trajectory com = out.dumbbell_traj.center_of_mass();
  const Vec origin = Vec::Zero(2);
  out.dumbbell = measure_precession(com, origin);
  const double l0 = dumbbell_angular_momentum(s0, eps);
  for (const auto& s : out.dumbbell_traj.states) {
    out.spin_drift = std::max(out.spin_drift, std::abs(s.theta_dot - s0.theta_dot) / s0.theta_dot);
    out.momentum_drift = std::max(
        out.momentum_drift, std::abs(dumbbell_angular_momentum(s, eps) - l0) / std::abs(l0));
  }

  const double avg_period = period / std::sqrt(2.0);
  const double h_avg = avg_period / 2048.0;
  const AveragedSystem system = satellite.assemble(eps);
  const Vec V0 = std::sqrt(2.0) * Vec(w0);
  out.averaged_traj = integrate_averaged(system, Vec(z0), V0, span * avg_period, h_avg);
  if (out.averaged_traj.meta.exited_region) {
    throw DomainError("averaged satellite orbit left the validity region");
  }
  out.averaged = measure_precession(out.averaged_traj, origin);

  // Pure Kepler control at the same resolution: steps of h_avg.
  const TimePeriodicPotential kepler = kepler_potential(cfg.sign, 0.5 * cfg.r_min, 2.0);
  out.kepler_traj = integrate_full(kepler, Vec(z0), V0, 16.0 * h_avg, span * avg_period, 16, 1);
  out.kepler = measure_precession(out.kepler_traj, origin);
  return out;
}

}  // namespace hfavg

#include "hfavg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace hfavg {

namespace {

void require_horizon(double t_end, double h) {
  if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
  if (!(h > 0.0)) throw InvalidArgument("step size must be positive");
}

// Uniform step count covering [0, t_end] with steps no longer than h.
long step_count(double t_end, double h) {
  return std::max(1L, static_cast<long>(std::ceil(t_end / h - 1e-9)));
}

Vec head(const Vec& y, int n) { return y.head(n); }
Vec tail(const Vec& y, int n) { return y.tail(n); }

Vec stack_state(const Vec& x, const Vec& v) {
  Vec y(x.size() + v.size());
  y << x, v;
  return y;
}

std::string format_time(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

}  // namespace

void Trajectory::append(double t, const Vec& x, const Vec& v) {
  if (dim_ == 0) dim_ = static_cast<int>(x.size());
  if (x.size() != dim_ || v.size() != dim_) throw InvalidArgument("state dimension mismatch");
  if (!times_.empty() && !(t > times_.back())) {
    throw InvalidArgument("trajectory times must be strictly increasing");
  }
  if (!std::isfinite(t) || !x.allFinite() || !v.allFinite()) {
    throw NonFiniteError("non-finite state at t = " + format_time(t));
  }
  times_.push_back(t);
  positions_.push_back(x);
  velocities_.push_back(v);
}

Vec Trajectory::position_at(double t) const {
  if (times_.empty()) throw InvalidArgument("empty trajectory");
  const double tol = 1e-12 * std::max(1.0, std::abs(times_.back()));
  if (t < times_.front() - tol || t > times_.back() + tol) {
    throw InvalidArgument("interpolation time " + format_time(t) + " outside trajectory span");
  }
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it != times_.end() && std::abs(*it - t) <= tol) {
    return positions_[static_cast<std::size_t>(it - times_.begin())];
  }
  if (it == times_.begin()) return positions_.front();
  if (it == times_.end()) return positions_.back();
  const std::size_t i1 = static_cast<std::size_t>(it - times_.begin());
  const std::size_t i0 = i1 - 1;
  const double dt = times_[i1] - times_[i0];
  const double s = (t - times_[i0]) / dt;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * positions_[i0] + h10 * dt * velocities_[i0] + h01 * positions_[i1] +
         h11 * dt * velocities_[i1];
}

Trajectory integrate_full(const TimePeriodicPotential& potential, const Vec& x0, const Vec& v0,
                          double eps, double t_end, int steps_per_period, int output_stride) {
  if (!(eps > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (steps_per_period < 16) throw InvalidArgument("steps_per_period must be at least 16");
  if (output_stride < 1) throw InvalidArgument("output stride must be positive");
  const double h_max = eps / steps_per_period;
  require_horizon(t_end, h_max);
  potential.require_valid(x0);

  const int n = potential.dim();
  const long steps = step_count(t_end, h_max);
  const double h = t_end / static_cast<double>(steps);
  auto rhs = [&](double t, const Vec& y) -> Vec {
    return stack_state(tail(y, n), -potential.gradient(head(y, n), t / eps));
  };

  Trajectory traj(n);
  traj.meta.epsilon = eps;
  traj.meta.system = "full";
  traj.meta.step = h;
  Vec y = stack_state(x0, v0);
  Vec carry = Vec::Zero(y.size());
  traj.append(0.0, x0, v0);
  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    compensated_add(y, carry, rk4_increment(rhs, t, y, h));
    const double t_next = static_cast<double>(k + 1) * h;
    if (!y.allFinite()) throw NonFiniteError("non-finite state at t = " + format_time(t_next));
    if (!potential.region().contains(head(y, n))) {
      traj.meta.exited_region = true;
      traj.meta.exit_time = t_next;
      break;
    }
    if ((k + 1) % output_stride == 0 || k + 1 == steps) {
      traj.append(t_next, head(y, n), tail(y, n));
    }
  }
  return traj;
}

Trajectory integrate_full(const Order1Potential& potential, const Vec& x0, const Vec& v0,
                          double eps, double t_end, int steps_per_period, int output_stride) {
  return integrate_full(potential.composite(eps), x0, v0, eps, t_end, steps_per_period,
                        output_stride);
}

Trajectory integrate_averaged(const AveragedSystem& system, const Vec& X0, const Vec& V0,
                              double t_end, double h_max, int output_stride) {
  require_horizon(t_end, h_max);
  if (output_stride < 1) throw InvalidArgument("output stride must be positive");
  if (!system.contains(X0)) throw DomainError("averaged start outside validity region");
  const int n = system.dim();
  const long steps = step_count(t_end, h_max);
  const double h = t_end / static_cast<double>(steps);
  auto rhs = [&](double, const Vec& y) -> Vec {
    return stack_state(tail(y, n), system.acceleration(head(y, n), tail(y, n)));
  };

  Trajectory traj(n);
  traj.meta.epsilon = system.epsilon();
  traj.meta.system = std::string("averaged-") + to_string(system.order());
  traj.meta.step = h;
  Vec y = stack_state(X0, V0);
  Vec carry = Vec::Zero(y.size());
  traj.append(0.0, X0, V0);
  for (long k = 0; k < steps; ++k) {
    const double t_next = static_cast<double>(k + 1) * h;
    try {
      compensated_add(y, carry, rk4_increment(rhs, static_cast<double>(k) * h, y, h));
    } catch (const DomainError&) {
      traj.meta.exited_region = true;
      traj.meta.exit_time = t_next;
      break;
    }
    if (!y.allFinite()) throw NonFiniteError("non-finite state at t = " + format_time(t_next));
    if (!system.contains(head(y, n))) {
      traj.meta.exited_region = true;
      traj.meta.exit_time = t_next;
      break;
    }
    if ((k + 1) % output_stride == 0 || k + 1 == steps) {
      traj.append(t_next, head(y, n), tail(y, n));
    }
  }
  return traj;
}

Vec guiding_center(const PointFields& fields, const Vec& v, double t, double eps,
                   AveragingOrder order) {
  const double tau = t / eps;
  const double w2 = order == AveragingOrder::standard ? eps * eps : eps * eps * eps;
  const double w3 = 2.0 * w2 * eps;
  return fields.x() + w2 * fields.s_grad(tau) - w3 * (fields.a_hess(tau) * v);
}

Vec guiding_center(const PeriodicFieldStack& stack, const Vec& x, const Vec& v, double t,
                   double eps, AveragingOrder order) {
  if (!x.allFinite() || !v.allFinite()) throw NonFiniteError("non-finite guiding-center input");
  return guiding_center(stack.at(x), v, t, eps, order);
}

Vec guiding_center_velocity(const PeriodicFieldStack& stack, const Vec& x, const Vec& v,
                            double t, double eps, AveragingOrder order) {
  const PointFields pf = stack.at(x);
  const double tau = t / eps;
  const double w1 = order == AveragingOrder::standard ? eps : eps * eps;
  return v + w1 * pf.v_grad(tau) - w1 * eps * (pf.s_hess(tau) * v);
}

Trajectory DumbbellTrajectory::center_of_mass() const {
  Trajectory out(2);
  out.meta = meta;
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.append(times[i], states[i].z, states[i].zdot);
  }
  return out;
}

Trajectory DumbbellTrajectory::generalized() const {
  Trajectory out(3);
  out.meta = meta;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& s = states[i];
    out.append(times[i], Eigen::Vector3d(s.z.x(), s.z.y(), s.theta),
               Eigen::Vector3d(s.zdot.x(), s.zdot.y(), s.theta_dot));
  }
  return out;
}

double dumbbell_angular_momentum(const DumbbellState& s, double eps) {
  const double orbital = s.z.x() * s.zdot.y() - s.z.y() * s.zdot.x();
  return 2.0 * orbital + 2.0 * eps * s.theta_dot;
}

DumbbellTrajectory integrate_dumbbell(const TimePeriodicPotential& ambient,
                                      const DumbbellState& state0, double eps, double t_end,
                                      double h_max, int output_stride) {
  if (!(eps > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (ambient.dim() != 2) throw InvalidArgument("dumbbell requires a planar ambient potential");
  if (output_stride < 1) throw InvalidArgument("output stride must be positive");
  require_horizon(t_end, h_max);
  const double arm = std::sqrt(eps);

  auto endpoints_valid = [&](const Vec& y) {
    const Eigen::Vector2d u(std::cos(y[2]), std::sin(y[2]));
    const Vec z = y.head(2);
    return ambient.region().contains(z + arm * u) && ambient.region().contains(z - arm * u);
  };
  // y = (z1, z2, theta, z1', z2', theta')
  auto rhs = [&](double, const Vec& y) -> Vec {
    const Eigen::Vector2d u(std::cos(y[2]), std::sin(y[2]));
    const Eigen::Vector2d du(-std::sin(y[2]), std::cos(y[2]));
    const Vec z = y.head(2);
    const Vec gp = ambient.gradient(z + arm * u, 0.0);
    const Vec gm = ambient.gradient(z - arm * u, 0.0);
    const double dv_dtheta = arm * (gp.dot(du) - gm.dot(du));
    Vec out(6);
    out.head(3) = y.tail(3);
    out.segment(3, 2) = -0.5 * (gp + gm);
    out[5] = -dv_dtheta / (2.0 * eps);
    return out;
  };

  Vec y(6);
  y << state0.z, state0.theta, state0.zdot, state0.theta_dot;
  Vec carry = Vec::Zero(6);
  if (!endpoints_valid(y)) throw DomainError("dumbbell endpoints start outside validity region");
  const long steps = step_count(t_end, h_max);
  const double h = t_end / static_cast<double>(steps);

  DumbbellTrajectory traj;
  traj.meta.epsilon = eps;
  traj.meta.system = "dumbbell";
  traj.meta.step = h;
  auto record = [&](double t) {
    DumbbellState s;
    s.z = y.head(2);
    s.theta = y[2];
    s.zdot = y.segment(3, 2);
    s.theta_dot = y[5];
    traj.times.push_back(t);
    traj.states.push_back(s);
  };
  record(0.0);
  for (long k = 0; k < steps; ++k) {
    compensated_add(y, carry, rk4_increment(rhs, static_cast<double>(k) * h, y, h));
    const double t_next = static_cast<double>(k + 1) * h;
    if (!y.allFinite()) throw NonFiniteError("non-finite dumbbell state at t = " + format_time(t_next));
    if (!endpoints_valid(y)) {
      traj.meta.exited_region = true;
      traj.meta.exit_time = t_next;
      break;
    }
    if ((k + 1) % output_stride == 0 || k + 1 == steps) record(t_next);
  }
  return traj;
}

void write_csv(const Trajectory& traj, std::ostream& os) {
  const int n = traj.dim();
  os << "t";
  for (int i = 1; i <= n; ++i) os << ",x" << i;
  for (int i = 1; i <= n; ++i) os << ",v" << i;
  os << '\n';
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (std::size_t k = 0; k < traj.size(); ++k) {
    put(traj.times()[k]);
    for (int i = 0; i < n; ++i) {
      os << ',';
      put(traj.positions()[k][i]);
    }
    for (int i = 0; i < n; ++i) {
      os << ',';
      put(traj.velocities()[k][i]);
    }
    os << '\n';
  }
}

Trajectory read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("empty trajectory CSV");
  const auto columns = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns < 3 || columns % 2 != 1 || line.rfind("t,", 0) != 0) {
    throw InvalidArgument("malformed trajectory CSV header: " + line);
  }
  const int n = (columns - 1) / 2;
  Trajectory traj(n);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
    if (static_cast<int>(values.size()) != columns) {
      throw InvalidArgument("trajectory CSV row has wrong column count");
    }
    Vec x(n), v(n);
    for (int i = 0; i < n; ++i) {
      x[i] = values[1 + i];
      v[i] = values[1 + n + i];
    }
    traj.append(values[0], x, v);
  }
  return traj;
}

nlohmann::json meta_json(const Trajectory& traj) {
  nlohmann::json j;
  j["epsilon"] = traj.meta.epsilon;
  j["system"] = traj.meta.system;
  j["integrator"] = traj.meta.integrator;
  j["step"] = traj.meta.step;
  j["dim"] = traj.dim();
  j["samples"] = traj.size();
  j["exited_region"] = traj.meta.exited_region;
  j["exit_time"] = traj.meta.exited_region ? nlohmann::json(traj.meta.exit_time) : nlohmann::json();
  std::vector<std::string> columns{"t"};
  for (int i = 1; i <= traj.dim(); ++i) columns.push_back("x" + std::to_string(i));
  for (int i = 1; i <= traj.dim(); ++i) columns.push_back("v" + std::to_string(i));
  j["columns"] = columns;
  return j;
}

}  // namespace hfavg

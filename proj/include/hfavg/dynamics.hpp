#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "hfavg/averaging.hpp"
#include "hfavg/fields.hpp"

namespace hfavg {

struct TrajectoryMeta {
  double epsilon = 0.0;
  std::string system;              // "full", "averaged", "dumbbell", ...
  std::string integrator = "rk4";
  double step = 0.0;
  bool exited_region = false;
  double exit_time = std::numeric_limits<double>::quiet_NaN();
};

/// Time-stamped (position, velocity) samples. Times strictly increase and all
/// states are finite.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(int dim) : dim_(dim) {}

  void append(double t, const Vec& x, const Vec& v);

  int dim() const { return dim_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Vec>& positions() const { return positions_; }
  const std::vector<Vec>& velocities() const { return velocities_; }
  double front_time() const { return times_.front(); }
  double back_time() const { return times_.back(); }

  /// Cubic Hermite interpolation of the position at t within the sampled span.
  Vec position_at(double t) const;

  TrajectoryMeta meta;

 private:
  int dim_ = 0;
  std::vector<double> times_;
  std::vector<Vec> positions_;
  std::vector<Vec> velocities_;
};

/// Increment of one classical RK4 step for y' = f(t, y).
template <typename F>
Eigen::VectorXd rk4_increment(const F& f, double t, const Eigen::VectorXd& y, double h) {
  const Eigen::VectorXd k1 = f(t, y);
  const Eigen::VectorXd k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
  const Eigen::VectorXd k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
  const Eigen::VectorXd k4 = f(t + h, y + h * k3);
  return (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <typename F>
Eigen::VectorXd rk4_step(const F& f, double t, const Eigen::VectorXd& y, double h) {
  return y + rk4_increment(f, t, y, h);
}

/// y += dy with Kahan compensation; carry holds the lost low-order bits.
inline void compensated_add(Eigen::VectorXd& y, Eigen::VectorXd& carry,
                            const Eigen::VectorXd& dy) {
  const Eigen::VectorXd d = dy - carry;
  const Eigen::VectorXd s = y + d;
  carry = (s - y) - d;
  y = s;
}

/// x'' = -grad U(x, t/eps) with fixed step eps / steps_per_period.
/// Leaving the validity region truncates the trajectory and sets
/// meta.exited_region / meta.exit_time.
Trajectory integrate_full(const TimePeriodicPotential& potential, const Vec& x0, const Vec& v0,
                          double eps, double t_end, int steps_per_period, int output_stride = 1);
Trajectory integrate_full(const Order1Potential& potential, const Vec& x0, const Vec& v0,
                          double eps, double t_end, int steps_per_period, int output_stride = 1);

/// Autonomous averaged system, fixed step h (independent of eps).
Trajectory integrate_averaged(const AveragedSystem& system, const Vec& X0, const Vec& V0,
                              double t_end, double h, int output_stride = 1);

/// Truncated guiding-center transform
///   standard: X = x + eps^2 S'(x,t/eps) - 2 eps^3 A''(x,t/eps) v
///   order1:   X = x + eps^3 S'(x,t/eps) - 2 eps^4 A''(x,t/eps) v
Vec guiding_center(const PeriodicFieldStack& stack, const Vec& x, const Vec& v, double t,
                   double eps, AveragingOrder order);
Vec guiding_center(const PointFields& fields, const Vec& v, double t, double eps,
                   AveragingOrder order);

/// Leading terms of the guiding-center velocity,
///   standard: v + eps V' - eps^2 S'' v,  order1: v + eps^2 V' - eps^3 S'' v.
Vec guiding_center_velocity(const PeriodicFieldStack& stack, const Vec& x, const Vec& v,
                            double t, double eps, AveragingOrder order);

/// Planar rigid dumbbell: two unit masses joined by a massless rod of
/// half-length sqrt(eps); z is the center of mass and theta the rod angle
/// (unwrapped).
struct DumbbellState {
  Eigen::Vector2d z = Eigen::Vector2d::Zero();
  Eigen::Vector2d zdot = Eigen::Vector2d::Zero();
  double theta = 0.0;
  double theta_dot = 0.0;
};

struct DumbbellTrajectory {
  std::vector<double> times;
  std::vector<DumbbellState> states;
  TrajectoryMeta meta;

  Trajectory center_of_mass() const;
  /// Generalized coordinates (z1, z2, theta) with their rates.
  Trajectory generalized() const;
};

/// Total angular momentum about the origin: 2 z x z' + 2 eps theta'.
double dumbbell_angular_momentum(const DumbbellState& s, double eps);

/// Exact two-mass dynamics in a static ambient potential U (tau ignored):
///   z'' = -grad_z V / 2,  theta'' = -dV/dtheta / (2 eps),
///   V = U(z + sqrt(eps) u) + U(z - sqrt(eps) u),  u = (cos theta, sin theta).
DumbbellTrajectory integrate_dumbbell(const TimePeriodicPotential& ambient,
                                      const DumbbellState& state0, double eps, double t_end,
                                      double h, int output_stride = 1);

/// CSV with header t,x1..xn,v1..vn and 17 significant digits.
void write_csv(const Trajectory& traj, std::ostream& os);
Trajectory read_csv(std::istream& is);
nlohmann::json meta_json(const Trajectory& traj);

}  // namespace hfavg

#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "hfavg/fields.hpp"

namespace hfavg {

inline constexpr int kDefaultModes = 16;

/// Fourier data of U, U' and U'' at one point x, plus the zero-mean
/// antiderivatives in tau:
///   V = int (U - Ubar),  S = int V,  A = int S,
/// each normalized to zero time average. Spatial derivatives of V, S, A are
/// antiderivatives of the corresponding derivatives of U, since the two
/// operations commute.
class PointFields {
 public:
  PointFields(Vec x, FourierSeries u, std::vector<FourierSeries> grad,
              std::vector<FourierSeries> hess);

  const Vec& x() const { return x_; }
  int dim() const { return static_cast<int>(x_.size()); }
  int num_modes() const { return u_.num_modes(); }

  const FourierSeries& u() const { return u_; }
  const FourierSeries& v() const { return v_; }
  const FourierSeries& s() const { return s_; }
  const FourierSeries& a() const { return a_; }

  double ubar() const { return u_.mean(); }
  Vec ubar_grad() const;

  Vec v_grad(double tau) const;
  Vec s_grad(double tau) const;
  Mat v_hess(double tau) const;
  Mat s_hess(double tau) const;
  Mat a_hess(double tau) const;

  /// avg(V' . V')
  double mean_vgrad_sq() const;
  /// avg(V'' V') = gradient of W = avg(V' . V') / 2
  Vec mean_vhess_vgrad() const;
  /// b = avg(S'' V')
  Vec mean_shess_vgrad() const;

 private:
  Vec eval_vec(const std::vector<FourierSeries>& series, double tau) const;
  Mat eval_mat(const std::vector<FourierSeries>& series, double tau) const;

  Vec x_;
  FourierSeries u_, v_, s_, a_;
  std::vector<FourierSeries> grad_;
  std::vector<FourierSeries> vgrad_, sgrad_;
  std::vector<FourierSeries> vhess_, shess_, ahess_;  // row-major n*n
};

/// Lazily evaluated antiderivative fields of a time-periodic potential.
/// Immutable; at() is pure and safe to call concurrently.
class PeriodicFieldStack {
 public:
  explicit PeriodicFieldStack(TimePeriodicPotential potential, int num_modes = kDefaultModes);

  const TimePeriodicPotential& potential() const { return potential_; }
  int num_modes() const { return plan_.num_modes(); }
  int dim() const { return potential_.dim(); }

  /// Throws DomainError outside the potential's validity region.
  PointFields at(const Vec& x) const;

 private:
  TimePeriodicPotential potential_;
  DftPlan plan_;
};

PeriodicFieldStack build_stack(const TimePeriodicPotential& potential,
                               int num_modes = kDefaultModes, FdConfig fd = {});

/// W = avg(V' . V') / 2.
double effective_potential(const PeriodicFieldStack& stack, const Vec& x);
/// W'(x) via the Parseval average of V'' V'.
Vec effective_potential_grad(const PeriodicFieldStack& stack, const Vec& x);
/// b(x) = avg(S'' V').
Vec magnetic_vector(const PeriodicFieldStack& stack, const Vec& x);
/// B = (b')^T - b' from a central-difference Jacobian of b. A non-positive
/// step selects the default cbrt(eps) * (1 + |x|).
Mat magnetic_matrix(const PeriodicFieldStack& stack, const Vec& x, double fd_step = 0.0);
/// Planar field strength B_12 - B_21 (zero-based B(0,1) - B(1,0)), which
/// equals 2 curl b.
double field_strength(const Mat& b_matrix);

enum class AveragingOrder { standard, order1 };

const char* to_string(AveragingOrder order);

/// Averaged force law
///   standard: X'' = -Ubar'(X) - eps^2 W'(X) + eps^3 B(X) X'
///   order1:   X'' = -U0'(X) - eps Ubar1'(X) - eps^4 W'(X) + eps^5 B(X) X'
/// with W, b, B built from U (standard) or U1 (order1).
class AveragedSystem {
 public:
  AveragedSystem(std::shared_ptr<const PeriodicFieldStack> stack, double eps,
                 AveragingOrder order, std::optional<TimePeriodicPotential> u0 = std::nullopt);

  int dim() const { return stack_->dim(); }
  double epsilon() const { return eps_; }
  AveragingOrder order() const { return order_; }
  const PeriodicFieldStack& stack() const { return *stack_; }
  std::shared_ptr<const PeriodicFieldStack> stack_ptr() const { return stack_; }
  bool contains(const Vec& x) const;

  /// Weights multiplying W' and B.
  double w_weight() const;
  double b_weight() const;

  Vec ubar_grad(const Vec& x) const;
  Vec w_grad(const Vec& x) const { return effective_potential_grad(*stack_, x); }
  Vec b_vec(const Vec& x) const { return magnetic_vector(*stack_, x); }
  Mat b_matrix(const Vec& x) const { return magnetic_matrix(*stack_, x); }

  /// Time-independent part of the averaged potential (without the magnetic term).
  double potential(const Vec& x) const;
  Vec acceleration(const Vec& x, const Vec& v) const;

 private:
  std::shared_ptr<const PeriodicFieldStack> stack_;
  double eps_;
  AveragingOrder order_;
  std::optional<TimePeriodicPotential> u0_;
};

AveragedSystem assemble(const TimePeriodicPotential& potential, double eps,
                        int num_modes = kDefaultModes);
AveragedSystem assemble(const Order1Potential& potential, double eps,
                        int num_modes = kDefaultModes);

/// Autonomous averaged Hamiltonian
///   K(X,P) = P^2/2 + Ubar + eps^2 avg(V'.V')/2 - eps^3 avg(S''V') . P
/// (order1: U0 + eps Ubar1 + eps^4 avg(V'.V')/2 - eps^5 avg(S''V') . P).
class EffectiveHamiltonian {
 public:
  explicit EffectiveHamiltonian(AveragedSystem system) : system_(std::move(system)) {}

  const AveragedSystem& system() const { return system_; }
  double operator()(const Vec& X, const Vec& P) const;
  /// Canonical momentum for a given velocity: P = X' + eps^3 b (order1: eps^5).
  Vec momentum(const Vec& X, const Vec& Xdot) const;

 private:
  AveragedSystem system_;
};

}  // namespace hfavg

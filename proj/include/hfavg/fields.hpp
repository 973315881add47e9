#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hfavg/error.hpp"

namespace hfavg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Complex = std::complex<double>;

/// Region on which a potential may be evaluated. Singular potentials
/// exclude a ball around the origin.
struct ValidityRegion {
  double r_min = 0.0;
  double r_max = std::numeric_limits<double>::infinity();

  bool contains(const Vec& x) const;
  std::string describe() const;
};

/// Finite-difference step policy. Steps scale with (1 + |x|_inf).
struct FdConfig {
  double gradient_scale = std::cbrt(std::numeric_limits<double>::epsilon());
  double hessian_scale = std::pow(std::numeric_limits<double>::epsilon(), 0.25);

  double gradient_step(const Vec& x) const;
  double hessian_step(const Vec& x) const;
};

/// A potential U(x, tau) on R^n, periodic in tau with period 1.
///
/// Gradient and Hessian are optional; when absent they are recovered by
/// central differences (Hessian from the analytic gradient when only the
/// gradient is supplied).
class TimePeriodicPotential {
 public:
  using EvalFn = std::function<double(const Vec&, double)>;
  using GradFn = std::function<Vec(const Vec&, double)>;
  using HessFn = std::function<Mat(const Vec&, double)>;

  TimePeriodicPotential() = default;
  TimePeriodicPotential(int dim, EvalFn eval, GradFn grad = {}, HessFn hess = {},
                        ValidityRegion region = {}, std::string note = {});

  int dim() const { return dim_; }
  const ValidityRegion& region() const { return region_; }
  const std::string& note() const { return note_; }
  bool has_gradient() const { return static_cast<bool>(grad_); }
  bool has_hessian() const { return static_cast<bool>(hess_); }
  const FdConfig& fd() const { return fd_; }
  TimePeriodicPotential with_fd(FdConfig fd) const;
  TimePeriodicPotential with_region(ValidityRegion region) const;

  double value(const Vec& x, double tau) const;
  Vec gradient(const Vec& x, double tau) const;
  Mat hessian(const Vec& x, double tau) const;

  /// Throws DomainError when x is outside the validity region.
  void require_valid(const Vec& x) const;

 private:
  int dim_ = 0;
  EvalFn eval_;
  GradFn grad_;
  HessFn hess_;
  ValidityRegion region_;
  std::string note_;
  FdConfig fd_;
};

/// U(x, tau; eps) = u0(x) + eps * u1(x, tau), u0 time independent.
struct Order1Potential {
  TimePeriodicPotential u0;
  TimePeriodicPotential u1;

  int dim() const { return u1.dim(); }
  double value(const Vec& x, double tau, double eps) const;
  Vec gradient(const Vec& x, double tau, double eps) const;
  /// The composite as an ordinary time-periodic potential at fixed eps.
  TimePeriodicPotential composite(double eps) const;
};

/// Truncated Fourier series of a period-1 function of tau:
/// f(tau) = sum_{k=-K..K} c_k exp(2 pi i k tau).
class FourierSeries {
 public:
  FourierSeries() : coeffs_(1, Complex{}) {}
  explicit FourierSeries(std::vector<Complex> coeffs);
  static FourierSeries zeros(int num_modes);

  int num_modes() const { return static_cast<int>(coeffs_.size() / 2); }
  Complex coeff(int k) const;
  void set_coeff(int k, Complex c);
  const std::vector<Complex>& coeffs() const { return coeffs_; }

  Complex evaluate_complex(double tau) const;
  /// Real part of the series at tau.
  double operator()(double tau) const { return evaluate_complex(tau).real(); }
  /// Same, with precomputed phasors exp(2 pi i k tau) for k = 0..K.
  double evaluate(const std::vector<Complex>& phasors) const;

  double mean() const { return coeff(0).real(); }
  double max_abs_coeff() const;
  bool is_real(double tol) const;

  FourierSeries derivative() const;
  FourierSeries without_mean() const;

  FourierSeries& operator+=(const FourierSeries& other);
  FourierSeries& operator-=(const FourierSeries& other);
  FourierSeries& operator*=(double s);

 private:
  std::vector<Complex> coeffs_;  // index k + K
};

/// exp(2 pi i k tau) for k = 0..num_modes.
std::vector<Complex> phasors(double tau, int num_modes);

/// Precomputed DFT on num_samples equispaced nodes tau_j = j / num_samples.
class DftPlan {
 public:
  explicit DftPlan(int num_samples);
  int num_samples() const { return m_; }
  int num_modes() const { return k_; }
  double node(int j) const { return static_cast<double>(j) / m_; }
  FourierSeries analyze(const std::vector<double>& samples) const;

 private:
  int m_;
  int k_;
  std::vector<Complex> twiddle_;  // exp(-2 pi i j / m), j = 0..m-1
};

/// Discrete Fourier interpolant of f on num_samples equispaced nodes.
/// Mode count is floor((num_samples - 1) / 2).
FourierSeries sample_fourier(const std::function<double(double)>& f, int num_samples);

/// Default tolerance on |c_0| relative to the largest coefficient.
inline constexpr double kZeroMeanTolerance = 1e-10;

/// Periodic antiderivative with zero time average: c_k / (2 pi i k), c_0 = 0.
FourierSeries zero_mean_antiderivative(const FourierSeries& s,
                                       double rel_tol = kZeroMeanTolerance);

/// Periodic-rectangle average over one period; exact for trig polynomials of
/// degree below resolution.
double time_average(const std::function<double(double)>& f, int resolution);

/// Time average of the product of two real series (Parseval).
double mean_product(const FourierSeries& a, const FourierSeries& b);

Vec fd_gradient(const TimePeriodicPotential& potential, const Vec& x, double tau, double step);
Mat fd_hessian(const TimePeriodicPotential& potential, const Vec& x, double tau, double step);

}  // namespace hfavg

#include "hfavg/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hfavg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double tau) { return tau - std::floor(tau); }

std::string format_tau(double tau) {
  std::ostringstream os;
  os.precision(17);
  os << tau;
  return os.str();
}

}  // namespace

bool ValidityRegion::contains(const Vec& x) const {
  if (!x.allFinite()) return false;
  const double r = x.norm();
  return r >= r_min && r <= r_max;
}

std::string ValidityRegion::describe() const {
  std::ostringstream os;
  os << "r in [" << r_min << ", " << r_max << "]";
  return os.str();
}

double FdConfig::gradient_step(const Vec& x) const {
  return gradient_scale * (1.0 + x.lpNorm<Eigen::Infinity>());
}

double FdConfig::hessian_step(const Vec& x) const {
  return hessian_scale * (1.0 + x.lpNorm<Eigen::Infinity>());
}

TimePeriodicPotential::TimePeriodicPotential(int dim, EvalFn eval, GradFn grad, HessFn hess,
                                             ValidityRegion region, std::string note)
    : dim_(dim),
      eval_(std::move(eval)),
      grad_(std::move(grad)),
      hess_(std::move(hess)),
      region_(region),
      note_(std::move(note)) {
  if (dim_ < 1) throw InvalidArgument("potential dimension must be positive");
  if (!eval_) throw InvalidArgument("potential requires an evaluation function");
}

TimePeriodicPotential TimePeriodicPotential::with_fd(FdConfig fd) const {
  TimePeriodicPotential copy = *this;
  copy.fd_ = fd;
  return copy;
}

TimePeriodicPotential TimePeriodicPotential::with_region(ValidityRegion region) const {
  TimePeriodicPotential copy = *this;
  copy.region_ = region;
  return copy;
}

void TimePeriodicPotential::require_valid(const Vec& x) const {
  if (x.size() != dim_) {
    throw InvalidArgument("point has dimension " + std::to_string(x.size()) +
                          ", potential expects " + std::to_string(dim_));
  }
  if (!region_.contains(x)) {
    std::ostringstream os;
    os << "point (" << x.transpose() << ") outside validity region " << region_.describe();
    throw DomainError(os.str());
  }
}

double TimePeriodicPotential::value(const Vec& x, double tau) const {
  return eval_(x, wrap_phase(tau));
}

Vec TimePeriodicPotential::gradient(const Vec& x, double tau) const {
  tau = wrap_phase(tau);
  if (grad_) return grad_(x, tau);
  return fd_gradient(*this, x, tau, fd_.gradient_step(x));
}

Mat TimePeriodicPotential::hessian(const Vec& x, double tau) const {
  tau = wrap_phase(tau);
  if (hess_) return hess_(x, tau);
  if (!grad_) return fd_hessian(*this, x, tau, fd_.hessian_step(x));
  // Jacobian of the analytic gradient, symmetrized.
  const double h = fd_.gradient_step(x);
  Mat jac(dim_, dim_);
  Vec xp = x;
  Vec xm = x;
  for (int i = 0; i < dim_; ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    jac.col(i) = (grad_(xp, tau) - grad_(xm, tau)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return 0.5 * (jac + jac.transpose());
}

double Order1Potential::value(const Vec& x, double tau, double eps) const {
  return u0.value(x, tau) + eps * u1.value(x, tau);
}

Vec Order1Potential::gradient(const Vec& x, double tau, double eps) const {
  return u0.gradient(x, tau) + eps * u1.gradient(x, tau);
}

TimePeriodicPotential Order1Potential::composite(double eps) const {
  auto a = u0;
  auto b = u1;
  ValidityRegion region{std::max(a.region().r_min, b.region().r_min),
                        std::min(a.region().r_max, b.region().r_max)};
  return TimePeriodicPotential(
      dim(), [a, b, eps](const Vec& x, double tau) { return a.value(x, tau) + eps * b.value(x, tau); },
      [a, b, eps](const Vec& x, double tau) -> Vec {
        return a.gradient(x, tau) + eps * b.gradient(x, tau);
      },
      [a, b, eps](const Vec& x, double tau) -> Mat {
        return a.hessian(x, tau) + eps * b.hessian(x, tau);
      },
      region, "order-1 composite");
}

FourierSeries::FourierSeries(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() % 2 != 1) {
    throw InvalidArgument("Fourier coefficient vector must have odd length 2K+1");
  }
}

FourierSeries FourierSeries::zeros(int num_modes) {
  if (num_modes < 0) throw InvalidArgument("negative mode count");
  return FourierSeries(std::vector<Complex>(2 * num_modes + 1, Complex{}));
}

Complex FourierSeries::coeff(int k) const {
  const int K = num_modes();
  if (k < -K || k > K) return {};
  return coeffs_[k + K];
}

void FourierSeries::set_coeff(int k, Complex c) {
  const int K = num_modes();
  if (k < -K || k > K) throw InvalidArgument("mode index out of range");
  coeffs_[k + K] = c;
}

std::vector<Complex> phasors(double tau, int num_modes) {
  std::vector<Complex> out(num_modes + 1);
  out[0] = 1.0;
  if (num_modes == 0) return out;
  const Complex step = std::polar(1.0, kTwoPi * wrap_phase(tau));
  // Recompute from polar every 8 modes to bound round-off growth.
  for (int k = 1; k <= num_modes; ++k) {
    out[k] = (k % 8 == 0) ? std::polar(1.0, kTwoPi * wrap_phase(k * tau)) : out[k - 1] * step;
  }
  return out;
}

Complex FourierSeries::evaluate_complex(double tau) const {
  const int K = num_modes();
  const auto ph = phasors(tau, K);
  Complex sum = coeffs_[K];
  for (int k = 1; k <= K; ++k) {
    sum += coeffs_[K + k] * ph[k] + coeffs_[K - k] * std::conj(ph[k]);
  }
  return sum;
}

double FourierSeries::evaluate(const std::vector<Complex>& ph) const {
  const int K = num_modes();
  double sum = coeffs_[K].real();
  for (int k = 1; k <= K; ++k) {
    sum += (coeffs_[K + k] * ph[k] + coeffs_[K - k] * std::conj(ph[k])).real();
  }
  return sum;
}

double FourierSeries::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

bool FourierSeries::is_real(double tol) const {
  const int K = num_modes();
  const double scale = std::max(1.0, max_abs_coeff());
  if (std::abs(coeffs_[K].imag()) > tol * scale) return false;
  for (int k = 1; k <= K; ++k) {
    if (std::abs(coeffs_[K - k] - std::conj(coeffs_[K + k])) > tol * scale) return false;
  }
  return true;
}

FourierSeries FourierSeries::derivative() const {
  FourierSeries out = *this;
  const int K = num_modes();
  for (int k = -K; k <= K; ++k) out.coeffs_[k + K] *= Complex(0.0, kTwoPi * k);
  return out;
}

FourierSeries FourierSeries::without_mean() const {
  FourierSeries out = *this;
  out.coeffs_[num_modes()] = 0.0;
  return out;
}

FourierSeries& FourierSeries::operator+=(const FourierSeries& other) {
  if (other.num_modes() > num_modes()) {
    FourierSeries wide = zeros(other.num_modes());
    for (int k = -num_modes(); k <= num_modes(); ++k) wide.set_coeff(k, coeff(k));
    *this = std::move(wide);
  }
  for (int k = -other.num_modes(); k <= other.num_modes(); ++k) {
    coeffs_[k + num_modes()] += other.coeff(k);
  }
  return *this;
}

FourierSeries& FourierSeries::operator-=(const FourierSeries& other) {
  FourierSeries neg = other;
  neg *= -1.0;
  return *this += neg;
}

FourierSeries& FourierSeries::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

DftPlan::DftPlan(int num_samples) : m_(num_samples), k_((num_samples - 1) / 2) {
  if (num_samples < 2) throw InvalidArgument("need at least 2 samples per period");
  twiddle_.resize(m_);
  for (int j = 0; j < m_; ++j) twiddle_[j] = std::polar(1.0, -kTwoPi * j / m_);
}

FourierSeries DftPlan::analyze(const std::vector<double>& samples) const {
  if (static_cast<int>(samples.size()) != m_) throw InvalidArgument("sample count mismatch");
  FourierSeries out = FourierSeries::zeros(k_);
  for (int k = 0; k <= k_; ++k) {
    Complex sum{};
    for (int j = 0; j < m_; ++j) sum += samples[j] * twiddle_[(static_cast<long>(k) * j) % m_];
    sum /= static_cast<double>(m_);
    out.set_coeff(k, sum);
    if (k > 0) out.set_coeff(-k, std::conj(sum));
  }
  return out;
}

FourierSeries sample_fourier(const std::function<double(double)>& f, int num_samples) {
  const DftPlan plan(num_samples);
  std::vector<double> samples(num_samples);
  for (int j = 0; j < num_samples; ++j) {
    const double tau = plan.node(j);
    samples[j] = f(tau);
    if (!std::isfinite(samples[j])) {
      throw NonFiniteError("non-finite sample at tau = " + format_tau(tau));
    }
  }
  return plan.analyze(samples);
}

FourierSeries zero_mean_antiderivative(const FourierSeries& s, double rel_tol) {
  const double scale = s.max_abs_coeff();
  if (std::abs(s.coeff(0)) > rel_tol * scale && scale > 0.0) {
    throw InvalidArgument("nonzero mean; subtract average first");
  }
  FourierSeries out = FourierSeries::zeros(s.num_modes());
  for (int k = 1; k <= s.num_modes(); ++k) {
    const Complex d(0.0, kTwoPi * k);
    out.set_coeff(k, s.coeff(k) / d);
    out.set_coeff(-k, s.coeff(-k) / (-d));
  }
  return out;
}

double time_average(const std::function<double(double)>& f, int resolution) {
  if (resolution < 2) throw InvalidArgument("time_average needs resolution >= 2");
  double sum = 0.0;
  for (int j = 0; j < resolution; ++j) {
    const double tau = static_cast<double>(j) / resolution;
    const double v = f(tau);
    if (!std::isfinite(v)) throw NonFiniteError("non-finite sample at tau = " + format_tau(tau));
    sum += v;
  }
  return sum / resolution;
}

double mean_product(const FourierSeries& a, const FourierSeries& b) {
  const int K = std::min(a.num_modes(), b.num_modes());
  double sum = (a.coeff(0) * std::conj(b.coeff(0))).real();
  for (int k = 1; k <= K; ++k) {
    sum += (a.coeff(k) * std::conj(b.coeff(k)) + a.coeff(-k) * std::conj(b.coeff(-k))).real();
  }
  return sum;
}

Vec fd_gradient(const TimePeriodicPotential& potential, const Vec& x, double tau, double step) {
  if (!(step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  const int n = static_cast<int>(x.size());
  Vec g(n);
  Vec xp = x;
  for (int i = 0; i < n; ++i) {
    xp[i] = x[i] + step;
    const double fp = potential.value(xp, tau);
    xp[i] = x[i] - step;
    const double fm = potential.value(xp, tau);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  if (!g.allFinite()) throw NonFiniteError("non-finite finite-difference gradient");
  return g;
}

Mat fd_hessian(const TimePeriodicPotential& potential, const Vec& x, double tau, double step) {
  if (!(step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  const int n = static_cast<int>(x.size());
  Mat h(n, n);
  const double f0 = potential.value(x, tau);
  Vec y = x;
  for (int i = 0; i < n; ++i) {
    y[i] = x[i] + step;
    const double fp = potential.value(y, tau);
    y[i] = x[i] - step;
    const double fm = potential.value(y, tau);
    y[i] = x[i];
    h(i, i) = (fp - 2.0 * f0 + fm) / (step * step);
    for (int j = 0; j < i; ++j) {
      double acc = 0.0;
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          y[i] = x[i] + si * step;
          y[j] = x[j] + sj * step;
          acc += si * sj * potential.value(y, tau);
        }
      }
      y[i] = x[i];
      y[j] = x[j];
      h(i, j) = h(j, i) = acc / (4.0 * step * step);
    }
  }
  if (!h.allFinite()) throw NonFiniteError("non-finite finite-difference Hessian");
  return h;
}

}  // namespace hfavg

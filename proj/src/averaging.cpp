#include "hfavg/averaging.hpp"

#include <cmath>

namespace hfavg {

namespace {

FourierSeries fluctuation_antiderivative(const FourierSeries& f) {
  return zero_mean_antiderivative(f.without_mean());
}

std::vector<FourierSeries> antiderivatives(const std::vector<FourierSeries>& in) {
  std::vector<FourierSeries> out;
  out.reserve(in.size());
  for (const auto& f : in) out.push_back(zero_mean_antiderivative(f.without_mean()));
  return out;
}

}  // namespace

PointFields::PointFields(Vec x, FourierSeries u, std::vector<FourierSeries> grad,
                         std::vector<FourierSeries> hess)
    : x_(std::move(x)), u_(std::move(u)), grad_(std::move(grad)) {
  v_ = fluctuation_antiderivative(u_);
  s_ = zero_mean_antiderivative(v_);
  a_ = zero_mean_antiderivative(s_);
  vgrad_ = antiderivatives(grad_);
  sgrad_ = antiderivatives(vgrad_);
  vhess_ = antiderivatives(hess);
  shess_ = antiderivatives(vhess_);
  ahess_ = antiderivatives(shess_);
}

Vec PointFields::ubar_grad() const {
  Vec g(dim());
  for (int i = 0; i < dim(); ++i) g[i] = grad_[i].mean();
  return g;
}

Vec PointFields::eval_vec(const std::vector<FourierSeries>& series, double tau) const {
  const auto ph = phasors(tau, num_modes());
  Vec out(dim());
  for (int i = 0; i < dim(); ++i) out[i] = series[i].evaluate(ph);
  return out;
}

Mat PointFields::eval_mat(const std::vector<FourierSeries>& series, double tau) const {
  const auto ph = phasors(tau, num_modes());
  const int n = dim();
  Mat out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out(i, j) = series[i * n + j].evaluate(ph);
  }
  return out;
}

Vec PointFields::v_grad(double tau) const { return eval_vec(vgrad_, tau); }
Vec PointFields::s_grad(double tau) const { return eval_vec(sgrad_, tau); }
Mat PointFields::v_hess(double tau) const { return eval_mat(vhess_, tau); }
Mat PointFields::s_hess(double tau) const { return eval_mat(shess_, tau); }
Mat PointFields::a_hess(double tau) const { return eval_mat(ahess_, tau); }

double PointFields::mean_vgrad_sq() const {
  double sum = 0.0;
  for (const auto& g : vgrad_) sum += mean_product(g, g);
  return sum;
}

Vec PointFields::mean_vhess_vgrad() const {
  const int n = dim();
  Vec out = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out[i] += mean_product(vhess_[i * n + j], vgrad_[j]);
  }
  return out;
}

Vec PointFields::mean_shess_vgrad() const {
  const int n = dim();
  Vec out = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out[i] += mean_product(shess_[i * n + j], vgrad_[j]);
  }
  return out;
}

PeriodicFieldStack::PeriodicFieldStack(TimePeriodicPotential potential, int num_modes)
    : potential_(std::move(potential)), plan_(2 * num_modes + 1) {
  if (num_modes < 1) throw InvalidArgument("stack needs at least one Fourier mode");
}

PointFields PeriodicFieldStack::at(const Vec& x) const {
  potential_.require_valid(x);
  const int n = dim();
  const int m = plan_.num_samples();
  std::vector<double> u(m);
  std::vector<std::vector<double>> g(n, std::vector<double>(m));
  std::vector<std::vector<double>> h(n * n, std::vector<double>(m));
  for (int j = 0; j < m; ++j) {
    const double tau = plan_.node(j);
    u[j] = potential_.value(x, tau);
    const Vec gj = potential_.gradient(x, tau);
    const Mat hj = potential_.hessian(x, tau);
    if (!std::isfinite(u[j]) || !gj.allFinite() || !hj.allFinite()) {
      throw NonFiniteError("non-finite potential data at tau = " + std::to_string(tau));
    }
    for (int i = 0; i < n; ++i) {
      g[i][j] = gj[i];
      for (int k = 0; k < n; ++k) h[i * n + k][j] = hj(i, k);
    }
  }
  std::vector<FourierSeries> gs;
  std::vector<FourierSeries> hs;
  gs.reserve(n);
  hs.reserve(n * n);
  for (const auto& s : g) gs.push_back(plan_.analyze(s));
  for (const auto& s : h) hs.push_back(plan_.analyze(s));
  return PointFields(x, plan_.analyze(u), std::move(gs), std::move(hs));
}

PeriodicFieldStack build_stack(const TimePeriodicPotential& potential, int num_modes,
                               FdConfig fd) {
  return PeriodicFieldStack(potential.with_fd(fd), num_modes);
}

double effective_potential(const PeriodicFieldStack& stack, const Vec& x) {
  return 0.5 * stack.at(x).mean_vgrad_sq();
}

Vec effective_potential_grad(const PeriodicFieldStack& stack, const Vec& x) {
  return stack.at(x).mean_vhess_vgrad();
}

Vec magnetic_vector(const PeriodicFieldStack& stack, const Vec& x) {
  return stack.at(x).mean_shess_vgrad();
}

Mat magnetic_matrix(const PeriodicFieldStack& stack, const Vec& x, double fd_step) {
  const int n = stack.dim();
  const double h = fd_step > 0.0 ? fd_step : FdConfig{}.gradient_step(x);
  // jac(i, j) = d b_i / d x_j
  Mat jac(n, n);
  Vec xp = x;
  Vec xm = x;
  for (int j = 0; j < n; ++j) {
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    jac.col(j) = (magnetic_vector(stack, xp) - magnetic_vector(stack, xm)) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return jac.transpose() - jac;
}

double field_strength(const Mat& b_matrix) {
  if (b_matrix.rows() != 2 || b_matrix.cols() != 2) {
    throw InvalidArgument("field strength is defined for planar systems only");
  }
  return b_matrix(0, 1) - b_matrix(1, 0);
}

const char* to_string(AveragingOrder order) {
  return order == AveragingOrder::standard ? "standard" : "order1";
}

AveragedSystem::AveragedSystem(std::shared_ptr<const PeriodicFieldStack> stack, double eps,
                               AveragingOrder order, std::optional<TimePeriodicPotential> u0)
    : stack_(std::move(stack)), eps_(eps), order_(order), u0_(std::move(u0)) {
  if (!stack_) throw InvalidArgument("averaged system needs a field stack");
  if (!(eps_ > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (order_ == AveragingOrder::order1 && !u0_) {
    throw InvalidArgument("order-1 averaged system needs the static potential U0");
  }
}

bool AveragedSystem::contains(const Vec& x) const {
  if (!stack_->potential().region().contains(x)) return false;
  return !u0_ || u0_->region().contains(x);
}

double AveragedSystem::w_weight() const {
  return order_ == AveragingOrder::standard ? std::pow(eps_, 2) : std::pow(eps_, 4);
}

double AveragedSystem::b_weight() const {
  return order_ == AveragingOrder::standard ? std::pow(eps_, 3) : std::pow(eps_, 5);
}

Vec AveragedSystem::ubar_grad(const Vec& x) const {
  const Vec g = stack_->at(x).ubar_grad();
  if (order_ == AveragingOrder::standard) return g;
  return u0_->gradient(x, 0.0) + eps_ * g;
}

double AveragedSystem::potential(const Vec& x) const {
  const PointFields pf = stack_->at(x);
  const double w = 0.5 * pf.mean_vgrad_sq();
  if (order_ == AveragingOrder::standard) return pf.ubar() + w_weight() * w;
  return u0_->value(x, 0.0) + eps_ * pf.ubar() + w_weight() * w;
}

Vec AveragedSystem::acceleration(const Vec& x, const Vec& v) const {
  const PointFields pf = stack_->at(x);
  Vec ubar = pf.ubar_grad();
  if (order_ == AveragingOrder::order1) {
    u0_->require_valid(x);
    ubar = u0_->gradient(x, 0.0) + eps_ * ubar;
  }
  Vec acc = -ubar - w_weight() * pf.mean_vhess_vgrad();
  acc += b_weight() * (magnetic_matrix(*stack_, x) * v);
  return acc;
}

AveragedSystem assemble(const TimePeriodicPotential& potential, double eps, int num_modes) {
  return AveragedSystem(std::make_shared<const PeriodicFieldStack>(potential, num_modes), eps,
                        AveragingOrder::standard);
}

AveragedSystem assemble(const Order1Potential& potential, double eps, int num_modes) {
  return AveragedSystem(std::make_shared<const PeriodicFieldStack>(potential.u1, num_modes), eps,
                        AveragingOrder::order1, potential.u0);
}

double EffectiveHamiltonian::operator()(const Vec& X, const Vec& P) const {
  const Vec b = system_.b_vec(X);
  return 0.5 * P.squaredNorm() + system_.potential(X) - system_.b_weight() * b.dot(P);
}

Vec EffectiveHamiltonian::momentum(const Vec& X, const Vec& Xdot) const {
  return Xdot + system_.b_weight() * system_.b_vec(X);
}

}  // namespace hfavg

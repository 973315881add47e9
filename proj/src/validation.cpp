#include "hfavg/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "hfavg/analysis.hpp"

namespace hfavg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec polar(double r, double phi) { return vec2(r * std::cos(phi), r * std::sin(phi)); }

double rel_err(const Vec& got, const Vec& want) {
  const double d = (got - want).norm();
  const double n = want.norm();
  return n > 0.0 ? d / n : d;
}

double rel_err(double got, double want) {
  return want != 0.0 ? std::abs(got - want) / std::abs(want) : std::abs(got);
}

TrigPolynomial trig(double c0, std::vector<double> c, std::vector<double> s) {
  TrigPolynomial p;
  p.c0 = c0;
  p.cos = std::move(c);
  p.sin = std::move(s);
  return p;
}

// Random point inside the part of the plane where a scenario is meant to be probed.
Vec sample_point(ScenarioKind kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (kind) {
    case ScenarioKind::ruled_surface: return polar(1.0 + 3.0 * u(rng), kTwoPi * u(rng));
    case ScenarioKind::satellite: return polar(0.6 + 2.4 * u(rng), kTwoPi * u(rng));
    default: return vec2(-1.5 + 3.0 * u(rng), -1.5 + 3.0 * u(rng));
  }
}

// Fourth-order central-difference curl of b, independent of magnetic_matrix.
double curl_b(const PeriodicFieldStack& stack, const Vec& x) {
  const double h = 1e-3 * std::max(x.norm(), 0.1);
  auto d = [&](int i, int comp) {
    auto at = [&](double s) {
      Vec y = x;
      y[i] += s;
      return magnetic_vector(stack, y)[comp];
    };
    return (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
  };
  return d(0, 1) - d(1, 0);
}

double empirical_order(double e1, double e2) { return std::log2(e1 / e2); }

ScenarioConfig ladder_config(ScenarioConfig cfg, std::vector<double> ladder, double t_end) {
  cfg.eps_ladder = std::move(ladder);
  cfg.t_end = t_end;
  return cfg;
}

using Clock = std::chrono::steady_clock;

CriterionResult start(int id, std::string name) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

CriterionResult criterion_convergence(const ValidationOptions& opt) {
  CriterionResult r = start(1, "guiding-center order");
  r.time_limit = 60.0;
  const double band = opt.quick ? 3.4 : 3.7;
  const std::vector<double> ladder =
      opt.quick ? std::vector<double>{1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256}
                : std::vector<double>{1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512};
  const double t_end = opt.quick ? 1.0 : 2.0;
  bool ok = true;
  for (const char* name : {"rotating_saddle", "custom"}) {
    BuiltScenario b = opt.build(name);
    b = opt.builder(ladder_config(b.config, ladder, t_end));
    const ConvergenceReport rep = run_convergence(b, opt.jobs);
    r.metrics[name] = rep.to_json();
    ok = ok && rep.fit.slope >= band;
    r.detail += std::string(r.detail.empty() ? "" : ", ") + name + " slope " +
                fmt("%.2f", rep.fit.slope);
  }
  r.detail += " (need >= " + fmt("%.1f", band) + ")";
  r.passed = ok;
  return r;
}

CriterionResult criterion_order1(const ValidationOptions& opt) {
  CriterionResult r = start(2, "order-1 guiding-center order");
  r.time_limit = 120.0;
  const double band = opt.quick ? 4.2 : 4.5;
  BuiltScenario b = opt.build("satellite");
  b = opt.builder(ladder_config(b.config, {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128},
                                opt.quick ? 1.0 : 2.0));
  const ConvergenceReport rep = run_convergence(b, opt.jobs);
  r.metrics = rep.to_json();
  r.passed = rep.fit.slope >= band;
  r.detail = "satellite slope " + fmt("%.2f", rep.fit.slope) + " (need >= " + fmt("%.1f", band) + ")";
  return r;
}

CriterionResult criterion_satellite_oracles(const ValidationOptions& opt) {
  CriterionResult r = start(3, "satellite closed forms");
  r.time_limit = 5.0;
  const double tol = 1e-6;
  double worst_u = 0, worst_w = 0, worst_b = 0;
  for (double sign : {-1.0, 1.0}) {
    ScenarioConfig cfg = opt.build("satellite").config;
    cfg.sign = sign;
    const BuiltScenario b = opt.builder(cfg);
    const SatelliteScenario oracle = satellite(sign, cfg.r_min);
    const PeriodicFieldStack stack(b.fast, cfg.num_modes);
    const double T = b.phase_period;
    for (int i = 0; i < 20; ++i) {
      const double rad = 0.5 + 2.5 * i / 19.0;
      const Vec x = polar(rad, 0.7 * i);
      const PointFields pf = stack.at(x);
      worst_u = std::max(worst_u, rel_err(pf.ubar() * T, oracle.ubar1(x)));
      worst_w = std::max(worst_w, rel_err(b.to_scenario_w(pf.mean_vgrad_sq()),
                                          oracle.mean_vgrad_sq(x)));
      worst_b = std::max(worst_b, rel_err(Vec(pf.mean_shess_vgrad() * b.to_scenario_b()),
                                          oracle.b(x)));
    }
  }
  r.metrics = {{"ubar1_rel_err", worst_u}, {"mean_vgrad_sq_rel_err", worst_w},
               {"b_rel_err", worst_b}, {"tolerance", tol}};
  r.passed = worst_u <= tol && worst_w <= tol && worst_b <= tol;
  r.detail = "max rel err Ubar1 " + fmt("%.1e", worst_u) + ", avg(V'.V') " +
             fmt("%.1e", worst_w) + ", b " + fmt("%.1e", worst_b);
  return r;
}

CriterionResult criterion_null_magnetic(const ValidationOptions& opt) {
  CriterionResult r = start(4, "null magnetic term for separable potentials");
  r.time_limit = 5.0;
  struct Pair {
    TrigPolynomial a;
    StaticShape u;
    int dim;
  };
  const std::vector<Pair> pairs{
      {trig(1.0, {1.0}, {}), StaticShape::harmonic, 2},
      {trig(0.5, {0.8}, {0.0, 0.3}), StaticShape::inverted, 2},
      {trig(-0.2, {0.6, 0.0, 0.4}, {0.5}), StaticShape::quartic, 3},
  };
  const double eps = 1.0 / 32;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  double worst_b = 0, worst_f = 0;
  for (const auto& p : pairs) {
    const OscillatoryScenario s = oscillatory(p.a, p.u, p.dim);
    const AveragedSystem sys = assemble(s.potential, eps);
    for (int k = 0; k < 12; ++k) {
      Vec x(p.dim), v(p.dim);
      for (int i = 0; i < p.dim; ++i) {
        x[i] = u(rng);
        v[i] = u(rng);
      }
      worst_b = std::max(worst_b, sys.b_vec(x).norm());
      const Vec want = s.averaged_acceleration(x, eps);
      const Vec got = sys.acceleration(x, v);
      worst_f = std::max(worst_f, (got - want).norm() / std::max(1.0, want.norm()));
    }
  }
  const double vsq = oscillatory(pairs[0].a, pairs[0].u, 2).v_mean_square;
  const double vsq_err = std::abs(vsq - 1.0 / (8.0 * std::numbers::pi * std::numbers::pi));
  r.metrics = {{"max_b", worst_b}, {"max_force_err", worst_f}, {"v_mean_square_err", vsq_err}};
  r.passed = worst_b <= 1e-10 && worst_f <= 1e-8 && vsq_err <= 1e-14;
  r.detail = "max |b| " + fmt("%.1e", worst_b) + " (<= 1e-10), force err " +
             fmt("%.1e", worst_f) + " (<= 1e-8)";
  return r;
}

CriterionResult criterion_structure(const ValidationOptions& opt) {
  CriterionResult r = start(5, "magnetic structure invariants");
  r.time_limit = 5.0;
  if (opt.catalog.empty()) {
    r.detail = "no scenarios in catalog";
    return r;
  }
  std::mt19937_64 rng(opt.seed);
  const int total = 200;
  const int per = (total + static_cast<int>(opt.catalog.size()) - 1) / static_cast<int>(opt.catalog.size());
  double worst_skew = 0, worst_id = 0;
  int count = 0;
  for (const auto& entry : opt.catalog) {
    const BuiltScenario b = opt.builder(entry.defaults);
    if (b.fast.dim() != 2) continue;
    const PeriodicFieldStack stack(b.fast, entry.defaults.num_modes);
    for (int k = 0; k < per && count < total; ++k, ++count) {
      const Vec x = sample_point(entry.defaults.kind, rng);
      const Mat B = magnetic_matrix(stack, x);
      const double scale = B.cwiseAbs().maxCoeff();
      const double skew = (B + B.transpose()).cwiseAbs().maxCoeff();
      if (scale > 0.0) worst_skew = std::max(worst_skew, skew / scale);
      const double fs = field_strength(B);
      const double curl2 = 2.0 * curl_b(stack, x);
      // Relative to the field scale, with an absolute floor at the round-off
      // level of the difference Jacobian for fields that vanish identically.
      const double tol = 1e-6 * std::max(std::abs(curl2), scale) + 1e-12;
      worst_id = std::max(worst_id, std::abs(fs - curl2) / tol);
    }
  }
  r.metrics = {{"points", count}, {"skew_rel", worst_skew}, {"identity_tolerance_fraction", worst_id}};
  r.passed = count == total && worst_skew <= 1e-9 && worst_id <= 1.0;
  r.detail = std::to_string(count) + " points, skew " + fmt("%.1e", worst_skew) +
             " (<= 1e-9), |B12 - B21 - 2 curl b| at " + fmt("%.2f", worst_id) +
             " of tolerance 1e-6 rel + 1e-12";
  return r;
}

CriterionResult criterion_ruled_surface(const ValidationOptions& opt) {
  CriterionResult r = start(6, "ruled-surface field decay");
  r.time_limit = 10.0;
  ScenarioConfig cfg = opt.build("ruled_surface").config;
  cfg.h_const = 0.3;
  cfg.h_cos = {1.0};
  cfg.h_sin = {};
  const BuiltScenario b = opt.builder(cfg);
  const PeriodicFieldStack stack(b.fast, cfg.num_modes);
  std::vector<double> radii, strengths;
  for (int i = 0; i < 16; ++i) {
    const double rad = std::pow(4.0, i / 15.0);
    radii.push_back(rad);
    strengths.push_back(std::abs(field_strength(magnetic_matrix(stack, polar(rad, 0.4)))) *
                        b.to_scenario_b());
  }
  const OrderFit fit = fit_order(radii, strengths);
  const Vec wgrad = effective_potential_grad(stack, polar(2.0, 0.4)) *
                    std::pow(b.phase_period, 2);
  r.metrics = {{"slope", fit.slope},
               {"target", -3.0},
               {"tolerance", 0.05},
               {"field_strength_r1", strengths.front()},
               {"w_grad_norm_r2", wgrad.norm()}};
  r.passed = std::abs(fit.slope + 3.0) <= 0.05;
  r.detail = "slope " + fmt("%.3f", fit.slope) + " (need -3.00 +- 0.05); |W'| at r=2 is " +
             fmt("%.2e", wgrad.norm());
  return r;
}

CriterionResult criterion_saddle(const ValidationOptions& opt) {
  CriterionResult r = start(7, "rotating-saddle closed form");
  r.time_limit = 20.0;
  const double eps = 1.0 / 128;
  const BuiltScenario b = opt.build("rotating_saddle");
  const AveragedSystem sys = b.assemble(eps);
  const RotatingSaddleScenario s = rotating_saddle();
  const std::vector<Vec> xs{vec2(1, 0), vec2(0.3, -0.7), vec2(-0.5, 0.2), vec2(0.8, 0.9)};
  const std::vector<Vec> vs{vec2(0, 0), vec2(0.4, -0.3), vec2(-1.0, 0.5)};
  double worst_quoted = 0, worst_derived = 0;
  for (const auto& x : xs) {
    for (const auto& v : vs) {
      const Vec got = sys.acceleration(x, v);
      worst_quoted = std::max(worst_quoted, rel_err(got, s.quoted_acceleration(x, v, eps)));
      worst_derived = std::max(worst_derived, rel_err(got, s.averaged_acceleration(x, v, eps)));
    }
  }
  const Trajectory full = integrate_full(b.full_potential(eps), vec2(0.05, 0.02), vec2(0.01, 0.0),
                                         b.lib_eps(eps), 20.0, 64, 64);
  double max_r = 0;
  for (const auto& x : full.positions()) max_r = std::max(max_r, x.norm());
  const bool bounded = !full.meta.exited_region && full.back_time() >= 20.0 - 1e-9 && max_r <= 1.0;
  r.metrics = {{"rel_err_vs_minus_2J", worst_quoted},
               {"rel_err_vs_plus_2J", worst_derived},
               {"max_radius_t20", max_r},
               {"bounded", bounded}};
  r.passed = worst_quoted <= 1e-8 && bounded;
  r.detail = "rel err vs -eps^2 X - 2 eps^3 J X' " + fmt("%.1e", worst_quoted) +
             " (<= 1e-8; vs +2 eps^3 J X' " + fmt("%.1e", worst_derived) +
             "), max |x| over t=20 " + fmt("%.3f", max_r);
  return r;
}

CriterionResult criterion_precession(const ValidationOptions& opt) {
  CriterionResult r = start(8, "satellite precession consistency");
  r.time_limit = 300.0;
  const BuiltScenario b = opt.build("satellite");
  const PrecessionComparison cmp = run_precession(b);
  r.metrics = cmp.to_json();
  for (auto* rep : {&r.metrics["dumbbell"], &r.metrics["averaged"], &r.metrics["kepler_control"]}) {
    rep->erase("minima_times");
  }
  const bool enough = cmp.dumbbell.orbits >= 10 && cmp.averaged.orbits >= 10;
  const bool control = cmp.kepler.measurable && std::abs(cmp.kepler.precession_per_orbit) <= 1e-4;
  r.passed = enough && cmp.same_sign() && control;
  r.detail = "dumbbell " + fmt("%+.4e", cmp.dumbbell.precession_per_orbit) + ", averaged " +
             fmt("%+.4e", cmp.averaged.precession_per_orbit) + " rad/orbit over " +
             std::to_string(std::min(cmp.dumbbell.orbits, cmp.averaged.orbits)) +
             " orbits; Kepler control " + fmt("%.1e", cmp.kepler.precession_per_orbit) +
             " (<= 1e-4)";
  return r;
}

CriterionResult criterion_hygiene(const ValidationOptions&) {
  CriterionResult r = start(9, "numerics hygiene");
  r.time_limit = 5.0;

  const TimePeriodicPotential quartic =
      separable_potential(trig(1.0, {}, {}), StaticShape::quartic, 2);
  const Trajectory tr = integrate_full(quartic, vec2(0.8, -0.3), vec2(0.2, 0.5), 1.0 / 64, 10.0,
                                       128, 16);
  auto energy = [&](std::size_t i) {
    return 0.5 * tr.velocities()[i].squaredNorm() + quartic.value(tr.positions()[i], 0.0);
  };
  const double e0 = energy(0);
  double drift = 0;
  for (std::size_t i = 0; i < tr.size(); ++i) drift = std::max(drift, std::abs(energy(i) - e0) / std::abs(e0));

  const TimePeriodicPotential poly =
      polynomial_potential(parse_polynomial_terms("0.25:4,0:cos:1;1:1,1:cos:1;0.5:0,3:sin:2"));
  const Vec x = vec2(0.7, -0.4);
  const double tau = 0.13;
  const double h1 = 1e-2, h2 = 5e-3;
  const double g1 = (fd_gradient(poly, x, tau, h1) - poly.gradient(x, tau)).norm();
  const double g2 = (fd_gradient(poly, x, tau, h2) - poly.gradient(x, tau)).norm();
  const double H1 = (fd_hessian(poly, x, tau, h1) - poly.hessian(x, tau)).norm();
  const double H2 = (fd_hessian(poly, x, tau, h2) - poly.hessian(x, tau)).norm();
  const PeriodicFieldStack stack(poly);
  auto fd_w = [&](double h) {
    Vec g(2);
    for (int i = 0; i < 2; ++i) {
      Vec p = x, m = x;
      p[i] += h;
      m[i] -= h;
      g[i] = (effective_potential(stack, p) - effective_potential(stack, m)) / (2 * h);
    }
    return (g - effective_potential_grad(stack, x)).norm();
  };
  const double w1 = fd_w(h1), w2 = fd_w(h2);
  const double order_g = empirical_order(g1, g2);
  const double order_h = empirical_order(H1, H2);
  const double order_w = empirical_order(w1, w2);

  const FourierSeries s = sample_fourier(
      [](double t) {
        return std::cos(kTwoPi * t) + 0.3 * std::sin(2 * kTwoPi * t) - 0.2 * std::cos(3 * kTwoPi * t);
      },
      33);
  const FourierSeries back = zero_mean_antiderivative(s).derivative();
  double roundtrip = 0;
  for (int k = -s.num_modes(); k <= s.num_modes(); ++k) {
    roundtrip = std::max(roundtrip, std::abs(back.coeff(k) - s.coeff(k)));
  }
  for (int j = 0; j < 64; ++j) roundtrip = std::max(roundtrip, std::abs(back(j / 64.0) - s(j / 64.0)));

  r.metrics = {{"energy_drift", drift},
               {"fd_gradient_order", order_g},
               {"fd_hessian_order", order_h},
               {"w_gradient_order", order_w},
               {"antiderivative_roundtrip", roundtrip}};
  const double min_order = std::min({order_g, order_h, order_w});
  r.passed = drift <= 1e-8 && min_order >= 1.9 && roundtrip <= 1e-12;
  r.detail = "energy drift " + fmt("%.1e", drift) + " (<= 1e-8), min FD order " +
             fmt("%.2f", min_order) + " (>= 1.9), antiderivative round trip " +
             fmt("%.1e", roundtrip) + " (<= 1e-12)";
  return r;
}

}  // namespace

nlohmann::json CriterionResult::to_json() const {
  return {{"id", id},           {"name", name},       {"passed", passed},  {"detail", detail},
          {"seconds", seconds}, {"time_limit", time_limit}, {"metrics", metrics}};
}

std::string CriterionResult::line() const {
  std::string out = passed ? "PASS" : "FAIL";
  out += id > 0 ? " [" + std::to_string(id) + "] " : " [-] ";
  out += name + ": " + detail + " (" + fmt("%.1f", seconds) + " s";
  if (time_limit > 0.0) out += " / " + fmt("%.0f", time_limit) + " s";
  return out + ")";
}

BuiltScenario ValidationOptions::build(const std::string& name) const {
  const ScenarioEntry* e = find_scenario(catalog, name);
  if (!e) throw InvalidArgument("scenario '" + name + "' is not in the catalog");
  return builder(e->defaults);
}

bool is_suite(const std::string& suite) {
  return suite == "invariants" || suite == "oracles" || suite == "convergence" || suite == "all";
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "invariants") return {4, 5, 9};
  if (suite == "oracles") return {3, 6, 7};
  if (suite == "convergence") return {1, 2, 8};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9};
  throw InvalidArgument("unknown suite '" + suite + "' (expected invariants, oracles, convergence or all)");
}

CriterionResult run_criterion(int id, const ValidationOptions& options) {
  using Fn = CriterionResult (*)(const ValidationOptions&);
  static const Fn table[kNumCriteria] = {
      criterion_convergence, criterion_order1,   criterion_satellite_oracles,
      criterion_null_magnetic, criterion_structure, criterion_ruled_surface,
      criterion_saddle,      criterion_precession, criterion_hygiene};
  if (id < 1 || id > kNumCriteria) throw InvalidArgument("no criterion " + std::to_string(id));
  static const char* names[kNumCriteria] = {
      "guiding-center order", "order-1 guiding-center order", "satellite closed forms",
      "null magnetic term for separable potentials", "magnetic structure invariants",
      "ruled-surface field decay", "rotating-saddle closed form",
      "satellite precession consistency", "numerics hygiene"};
  const auto t0 = Clock::now();
  CriterionResult r;
  try {
    r = table[id - 1](options);
  } catch (const std::exception& e) {
    r = start(id, names[id - 1]);
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (r.passed && r.time_limit > 0.0 && r.seconds > r.time_limit) {
    r.passed = false;
    r.detail += "; exceeded time limit";
  }
  return r;
}

CriterionResult check_catalog_oracles(const ValidationOptions& opt) {
  CriterionResult r = start(0, "catalog oracles");
  const auto t0 = Clock::now();
  const double tol = 1e-6;
  std::vector<std::string> failures;
  int checked = 0;
  try {
    for (const auto& entry : opt.catalog) {
      const BuiltScenario b = opt.builder(entry.defaults);
      if (!b.oracle || b.fast.dim() != 2) continue;
      const double eps = entry.defaults.eps_ladder.front();
      const AveragedSystem sys = b.assemble(eps);
      double worst = 0;
      for (double rad : {0.8, 1.2, 2.0}) {
        for (double phi : {0.3, 2.1, 4.0}) {
          const Vec x = polar(rad, phi);
          const Vec v = vec2(0.3, -0.2);
          worst = std::max(worst, rel_err(sys.acceleration(x, v), b.oracle(x, v, eps)));
        }
      }
      r.metrics[entry.name] = worst;
      ++checked;
      if (worst > tol) failures.push_back(entry.name + " (rel err " + fmt("%.1e", worst) + ")");
    }
    r.passed = failures.empty() && checked > 0;
    if (checked == 0) {
      r.detail = "no scenarios with oracles";
    } else if (failures.empty()) {
      r.detail = std::to_string(checked) + " scenarios agree with their oracles (<= 1e-6)";
    } else {
      r.detail = "oracle mismatch:";
      for (const auto& f : failures) r.detail += " " + f;
    }
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

std::vector<CriterionResult> run_suite(const std::string& suite, const ValidationOptions& options) {
  std::vector<CriterionResult> out;
  for (int id : suite_criteria(suite)) out.push_back(run_criterion(id, options));
  if (suite == "oracles" || suite == "all") out.push_back(check_catalog_oracles(options));
  return out;
}

nlohmann::json summary_json(const std::string& suite, const std::vector<CriterionResult>& results) {
  nlohmann::json items = nlohmann::json::array();
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& r : results) {
    items.push_back(r.to_json());
    if (!r.passed) failed.push_back(r.id > 0 ? nlohmann::json(r.id) : nlohmann::json(r.name));
  }
  return {{"suite", suite}, {"passed", failed.empty()}, {"failed", failed}, {"results", items}};
}

}  // namespace hfavg

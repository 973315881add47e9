#include "hfavg/cli.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "hfavg/analysis.hpp"

namespace hfavg {

namespace fs = std::filesystem;

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes files below one run directory and records them for the manifest.
class OutputSet {
 public:
  explicit OutputSet(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  const fs::path& root() const { return root_; }

  void text(const std::string& name, const std::string& content) {
    std::ofstream os(root_ / name, std::ios::binary);
    if (!os) throw Error("cannot write " + (root_ / name).string());
    os << content;
    if (!os) throw Error("write failed for " + (root_ / name).string());
    names_.push_back(name);
  }

  void json(const std::string& name, const nlohmann::json& j) { text(name, j.dump(2) + "\n"); }

  void trajectory(const std::string& stem, const Trajectory& traj) {
    std::ostringstream os;
    write_csv(traj, os);
    text(stem + ".csv", os.str());
    json(stem + ".json", meta_json(traj));
  }

  RunManifest manifest(const ScenarioConfig& cfg) const {
    RunManifest m;
    m.config = cfg.to_kv();
    m.timestamp = utc_timestamp();
    for (const auto& n : names_) {
      m.files.push_back({n, sha256_file(root_ / n), fs::file_size(root_ / n)});
    }
    return m;
  }

 private:
  fs::path root_;
  std::vector<std::string> names_;
};

std::string scenario_names(const ScenarioCatalog& catalog) {
  std::string out;
  for (const auto& e : catalog) out += (out.empty() ? "" : ", ") + e.name;
  return out.empty() ? "(none)" : out;
}

}  // namespace

nlohmann::json RunManifest::to_json() const {
  nlohmann::json files_json = nlohmann::json::array();
  for (const auto& f : files) {
    files_json.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  return {{"config", config},
          {"tool_version", tool_version},
          {"timestamp", timestamp},
          {"files", files_json}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  m.config = j.at("config").get<std::map<std::string, std::string>>();
  m.tool_version = j.at("tool_version").get<std::string>();
  m.timestamp = j.at("timestamp").get<std::string>();
  for (const auto& f : j.at("files")) {
    m.files.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>(),
                       f.at("bytes").get<std::uintmax_t>()});
  }
  return m;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

std::vector<std::string> verify_manifest(const RunManifest& manifest, const fs::path& root) {
  std::vector<std::string> problems;
  for (const auto& f : manifest.files) {
    const fs::path p = root / f.path;
    if (!fs::exists(p)) {
      problems.push_back("missing " + f.path);
    } else if (sha256_file(p) != f.sha256) {
      problems.push_back("digest mismatch for " + f.path);
    }
  }
  return problems;
}

std::string default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return env && *env ? env : "out";
}

ScenarioConfig resolve_config(const ScenarioEntry& entry, const RunOverrides& overrides) {
  ScenarioConfig cfg = entry.defaults;
  cfg.out_dir = default_out_dir();
  if (!overrides.config_file.empty()) {
    try {
      cfg = ScenarioConfig::parse(read_file(overrides.config_file), cfg);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("--config " + overrides.config_file + ": " + e.what());
    }
  }
  for (const auto& [key, value] : overrides.values) {
    try {
      cfg.set(key, value);
    } catch (const InvalidArgument& e) {
      auto it = overrides.flag_of.find(key);
      const std::string flag = it != overrides.flag_of.end() ? it->second : "--set " + key;
      throw InvalidArgument("invalid value for " + flag + ": " + e.what());
    }
  }
  if (cfg.name != entry.name) cfg.name = entry.name;
  return cfg;
}

int cmd_list(const ScenarioCatalog& catalog, std::ostream& out) {
  if (catalog.empty()) {
    out << "no scenarios\n";
    return kExitOk;
  }
  std::size_t width = 0;
  for (const auto& e : catalog) width = std::max(width, e.name.size());
  for (const auto& e : catalog) {
    out << e.name << std::string(width - e.name.size() + 2, ' ') << e.description
        << " [model: " << e.reference << "]\n";
  }
  return kExitOk;
}

int cmd_run(const ScenarioCatalog& catalog, const std::string& name,
            const RunOverrides& overrides, std::ostream& out, std::ostream& err) {
  const ScenarioEntry* entry = find_scenario(catalog, name);
  if (!entry) {
    err << "unknown scenario '" << name << "'; valid names: " << scenario_names(catalog) << "\n";
    return kExitUsage;
  }
  ScenarioConfig cfg;
  BuiltScenario built;
  try {
    cfg = resolve_config(*entry, overrides);
    built = build_scenario(cfg);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    OutputSet files(fs::path(cfg.out_dir) / cfg.name);
    files.text("config.txt", cfg.serialize());

    const ConvergenceReport rep = run_convergence(built, overrides.jobs);
    files.json("convergence.json", rep.to_json());
    std::ostringstream csv;
    rep.write_csv(csv);
    files.text("convergence.csv", csv.str());
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
      files.trajectory("full_" + std::to_string(i), rep.points[i].full);
      files.trajectory("averaged_" + std::to_string(i), rep.points[i].averaged);
    }
    out << cfg.name << ": ";
    for (const auto& p : rep.points) out << "eps " << p.eps << " err " << p.error << "; ";
    out << "slope " << rep.fit.slope << " (residual " << rep.fit.residual << ")\n";

    if (built.order == AveragingOrder::order1) {
      const PrecessionComparison cmp = run_precession(built);
      files.json("precession.json", cmp.to_json());
      files.trajectory("dumbbell", cmp.dumbbell_traj.generalized());
      files.trajectory("averaged_orbit", cmp.averaged_traj);
      files.trajectory("kepler_orbit", cmp.kepler_traj);
      out << "precession per orbit: dumbbell " << cmp.dumbbell.precession_per_orbit
          << ", averaged " << cmp.averaged.precession_per_orbit << ", Kepler control "
          << cmp.kepler.precession_per_orbit << (cmp.same_sign() ? " (same sign)" : " (sign differs)")
          << "\n";
    }

    const RunManifest manifest = files.manifest(cfg);
    {
      std::ofstream os(files.root() / "manifest.json");
      os << manifest.to_json().dump(2) << "\n";
    }
    const auto problems = verify_manifest(manifest, files.root());
    if (!problems.empty()) {
      for (const auto& p : problems) err << "manifest: " << p << "\n";
      return kExitFailure;
    }
    out << "wrote " << manifest.files.size() << " files to " << files.root().string() << "\n";
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_validate(const std::string& suite, const ValidationOptions& options,
                 const std::string& out_dir, bool print_json, std::ostream& out,
                 std::ostream& err) {
  if (!is_suite(suite)) {
    err << "unknown suite '" << suite << "'; valid suites: invariants, oracles, convergence, all\n";
    return kExitUsage;
  }
  const auto results = run_suite(suite, options);
  bool ok = true;
  for (const auto& r : results) {
    out << r.line() << "\n";
    ok = ok && r.passed;
  }
  const nlohmann::json summary = summary_json(suite, results);
  if (!out_dir.empty()) {
    try {
      fs::create_directories(out_dir);
      std::ofstream os(fs::path(out_dir) / ("validation_" + suite + ".json"));
      os << summary.dump(2) << "\n";
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitFailure;
    }
  }
  if (print_json) out << summary.dump(2) << "\n";
  if (!ok) {
    err << "failed:";
    for (const auto& r : results) {
      if (!r.passed) err << " " << (r.id > 0 ? "[" + std::to_string(r.id) + "] " : "") << r.name << ";";
    }
    err << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            const ScenarioCatalog& catalog) {
  CLI::App app{"High-frequency averaging experiments", "hfavg"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  auto* list = app.add_subcommand("list", "List the scenario catalog");

  auto* run = app.add_subcommand("run", "Run a scenario: convergence ladder and reports");
  std::string scenario;
  RunOverrides ov;
  std::string eps_ladder, t_end, spp, out_dir, seed, sign, orbits;
  std::vector<std::string> sets;
  run->add_option("scenario", scenario, "Scenario name")->required();
  run->add_option("--eps-ladder", eps_ladder, "Comma-separated eps values, e.g. 1/64,1/128");
  run->add_option("--t-end", t_end, "Horizon");
  run->add_option("--steps-per-period", spp, "RK4 steps per fast period");
  run->add_option("--out-dir", out_dir, std::string("Output directory (default $") + kOutDirEnv + " or out)");
  run->add_option("--jobs", ov.jobs, "Parallel jobs over the eps ladder")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Seed (reserved; all runs are deterministic)");
  run->add_option("--sign", sign, "Kepler sign for the satellite: -1 attractive, +1 repulsive");
  run->add_option("--orbits", orbits, "Satellite precession horizon in orbits");
  run->add_option("--config", ov.config_file, "Key-value config file");
  run->add_option("--set", sets, "Override any config key: key=value");

  auto* validate = app.add_subcommand("validate", "Run acceptance suites");
  std::string suite;
  bool quick = false, print_json = false;
  int jobs = 1;
  std::string vout_dir;
  unsigned vseed = 0;
  validate->add_option("suite", suite, "invariants | oracles | convergence | all")->required();
  validate->add_flag("--quick", quick, "Shorter horizon with bands widened by 0.3");
  validate->add_flag("--json", print_json, "Print the summary JSON");
  validate->add_option("--jobs", jobs, "Parallel jobs")->check(CLI::PositiveNumber);
  validate->add_option("--out-dir", vout_dir, "Directory for validation_<suite>.json");
  validate->add_option("--seed", vseed, "Seed for random test points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (list->parsed()) return cmd_list(catalog, out);

  if (run->parsed()) {
    auto put = [&](const std::string& key, const std::string& flag, const std::string& value,
                   const CLI::Option* opt) {
      if (opt->count() == 0) return;
      ov.values[key] = value;
      ov.flag_of[key] = flag;
    };
    put("eps_ladder", "--eps-ladder", eps_ladder, run->get_option("--eps-ladder"));
    put("t_end", "--t-end", t_end, run->get_option("--t-end"));
    put("steps_per_period", "--steps-per-period", spp, run->get_option("--steps-per-period"));
    put("out_dir", "--out-dir", out_dir, run->get_option("--out-dir"));
    put("seed", "--seed", seed, run->get_option("--seed"));
    put("sign", "--sign", sign, run->get_option("--sign"));
    put("orbits", "--orbits", orbits, run->get_option("--orbits"));
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        err << "error: --set expects key=value, got '" << kv << "'\n";
        return kExitUsage;
      }
      const std::string key = kv.substr(0, eq);
      if (ov.values.count(key)) continue;  // dedicated flags win
      ov.values[key] = kv.substr(eq + 1);
      ov.flag_of[key] = "--set " + key;
    }
    return cmd_run(catalog, scenario, ov, out, err);
  }

  ValidationOptions options;
  options.quick = quick;
  options.jobs = jobs;
  options.seed = vseed;
  options.catalog = catalog;
  if (validate->get_option("--out-dir")->count() == 0) vout_dir = default_out_dir();
  return cmd_validate(suite, options, vout_dir, print_json, out, err);
}

}  // namespace hfavg

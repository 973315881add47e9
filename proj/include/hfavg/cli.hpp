#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "hfavg/scenarios.hpp"
#include "hfavg/validation.hpp"

namespace hfavg {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kOutDirEnv = "HFAVG_OUT_DIR";

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct ManifestFile {
  std::string path;  // relative to the manifest directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::map<std::string, std::string> config;
  std::string tool_version = kToolVersion;
  std::string timestamp;  // UTC, ISO 8601
  std::vector<ManifestFile> files;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

std::string sha256_file(const std::filesystem::path& path);
/// Lists missing or modified files; empty when the manifest holds.
std::vector<std::string> verify_manifest(const RunManifest& manifest,
                                         const std::filesystem::path& root);

/// Flag values for `run`, already split from the command line.
struct RunOverrides {
  std::string config_file;
  std::map<std::string, std::string> values;  // config key -> raw value
  std::map<std::string, std::string> flag_of; // config key -> flag name, for messages
  int jobs = 1;
};

/// Catalog defaults, then the config file, then flags.
ScenarioConfig resolve_config(const ScenarioEntry& entry, const RunOverrides& overrides);

int cmd_list(const ScenarioCatalog& catalog, std::ostream& out);
int cmd_run(const ScenarioCatalog& catalog, const std::string& name,
            const RunOverrides& overrides, std::ostream& out, std::ostream& err);
int cmd_validate(const std::string& suite, const ValidationOptions& options,
                 const std::string& out_dir, bool print_json, std::ostream& out,
                 std::ostream& err);

/// Full command line: list | run <scenario> | validate <suite>.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            const ScenarioCatalog& catalog = default_catalog());

std::string default_out_dir();

}  // namespace hfavg

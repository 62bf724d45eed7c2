#pragma once

#include <filesystem>
#include <string>

#include "fsl/experiments.hpp"

namespace fsl {

/// A validated run description. Every key of the config file maps onto one
/// field here; unset keys take the defaults of the named experiment.
struct RunConfig {
  std::string experiment;
  ExperimentParams params;
  std::filesystem::path output = "fsl-runs";
  /// Angular table file for n = 2, empty when the default cos table is used.
  std::filesystem::path h_table;
};

/// Thrown for syntax errors (with line number) and invalid or unknown keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

RunConfig load_config(const std::filesystem::path& path);

/// Parses INI text; relative paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");

/// Every key with its resolved value, grouped in sections. Parsing the text
/// again yields the same config.
std::string resolved_config(const RunConfig& config);

struct RunOutcome {
  std::filesystem::path directory;
  ExperimentReport report;
  /// The directory existed already; nothing was written.
  bool reused = false;
};

/// Runs the experiment into <output>/<experiment>-<digest prefix>. An
/// existing directory for the same resolved config is never overwritten.
RunOutcome execute(const RunConfig& config);

/// 0 pass, 1 fail, 2 inconclusive.
int exit_code(Verdict verdict);

}  // namespace fsl

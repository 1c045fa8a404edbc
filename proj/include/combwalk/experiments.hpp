#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "combwalk/config.hpp"
#include "json.hpp"

namespace combwalk {

inline constexpr const char* kVersion = "1.0.0";

/// Command-line values that take precedence over the config file.
struct RunOverrides {
  std::optional<uint64_t> seed;
  std::optional<int> threads;
};

struct ExperimentResult {
  Experiment experiment = Experiment::simulate;
  bool pass = true;
  nlohmann::json summary;
  std::vector<std::pair<std::string, std::string>> files;  // name -> contents, summary.json included
};

/// Worker count: override, then run.threads ("auto" or 0 means unset), then
/// COMBWALK_THREADS, then the hardware.
int effective_threads(const ExperimentConfig& cfg, const RunOverrides& o);

/// Runs one experiment. Throws ConfigError when the config does not fit the
/// experiment (missing B, infinite B for comb, gamma1 == gamma2 for the laws).
ExperimentResult run_experiment(const ExperimentConfig& cfg, Experiment exp, const RunOverrides& o = {});

/// run.output_dir when given, otherwise "combwalk-<experiment>".
std::filesystem::path default_output_dir(const ExperimentConfig& cfg, Experiment exp);

/// Writes every file of the result into dir (created if needed), LF endings.
void write_outputs(const ExperimentResult& r, const std::filesystem::path& dir);

}  // namespace combwalk

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "combwalk/bset.hpp"
#include "combwalk/engine.hpp"
#include "json.hpp"

namespace combwalk {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { simulate, equivalence, density, exponent, comb, supcheck, laws_table };
enum class EngineChoice { markov, decomposed, both };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);
std::vector<EngineKind> engines_of(EngineChoice c);

/// Typed access to one config section. Every key read is recorded so that
/// the summary can echo exactly the fields that were used.
class Section {
 public:
  Section() = default;
  Section(std::string name, std::map<std::string, std::string> values)
      : name_(std::move(name)), values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.contains(key); }
  std::string text(const std::string& key, const std::string& fallback) const;
  std::optional<std::string> text(const std::string& key) const;
  double real(const std::string& key, double fallback) const;
  std::optional<double> real(const std::string& key) const;
  int64_t integer(const std::string& key, int64_t fallback) const;
  std::optional<int64_t> integer(const std::string& key) const;
  uint64_t u64(const std::string& key, uint64_t fallback) const;
  std::vector<double> reals(const std::string& key, std::vector<double> fallback) const;

  const std::string& name() const { return name_; }
  const nlohmann::json& used() const { return used_; }

 private:
  std::string field(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }
  std::string name_;
  std::map<std::string, std::string> values_;
  mutable nlohmann::json used_ = nlohmann::json::object();
};

struct ExperimentConfig {
  std::optional<Experiment> experiment;  // from the file's top-level `experiment` key
  std::optional<BSpec> bspec;
  nlohmann::json bspec_echo;
  Section run;     // n_steps, replicas, seed, engine, dt, output_dir, threads
  Section params;  // experiment-specific keys
  std::string source;
};

/// Parses the flat `key = value` format with [bspec], [run] and [params]
/// sections. Lines starting with '#' or ';' are comments. Numeric values may
/// be written as fractions (e.g. 1/3). Throws ConfigError with the line or
/// field at fault.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Parses a number, accepting a/b fractions and a leading Unicode minus.
double parse_number(const std::string& text);

}  // namespace combwalk

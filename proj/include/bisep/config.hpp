#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bisep/profiles.hpp"

namespace bisep {

enum class Method { BiSep, TPower, TPowerSingle };

std::string method_name(Method m);
Method parse_method(const std::string& name);

enum class ExperimentKind { MSweep, Heatmap, KvDecoupling, RhoTable };

std::string experiment_name(ExperimentKind kind);  // m_sweep, heatmap, ...
ExperimentKind parse_experiment(const std::string& name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::MSweep;

  Index n1 = 1000;
  Index n2 = 1000;
  Index k_u = 20;
  Index k_v = 20;
  double rho = 0.8;
  Index m = 1000;  // sample size for sweeps that do not vary m
  SignalProfile profile_u = SignalProfile::flat();
  SignalProfile profile_v = SignalProfile::flat();

  std::vector<Index> m_grid;
  std::vector<std::pair<double, double>> alpha_grid;  // (alpha_u, alpha_v)
  std::vector<Index> kv_grid;
  std::vector<double> rho_grid;
  std::vector<SignalProfile> table_profiles;  // rho_table families

  Index trials = 20;
  std::uint64_t base_seed = 20250101;
  std::vector<Method> methods;
  Index tpower_restarts = 20;
  Index tpower_max_iters = 200;
  unsigned threads = 0;  // 0: hardware concurrency
  bool timing = true;    // false writes runtime_s = 0 for byte-stable CSVs
};

/// Thrown for malformed config text or out-of-range values; the message
/// starts with the offending field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Documented defaults for an experiment, mirroring the published settings.
ExperimentConfig default_config(ExperimentKind kind);

/// Reduced sizes for quick runs: n = 300, k = 10, m in {200 .. 3000}.
void apply_small_preset(ExperimentConfig& cfg);

/// Resolves a configuration from INI-style text plus "section.key=value"
/// overrides (applied in order, after the file). Unknown keys are rejected.
///
///   experiment = m_sweep
///   [model]  n1 n2 n k_u k_v k rho m profile_u profile_v
///   [sweep]  m_grid alpha_grid kv_grid rho_grid table_profiles
///   [run]    trials base_seed methods tpower_restarts tpower_max_iters
///            threads timing
ExperimentConfig parse_config(const std::string& ini_text,
                              std::span<const std::string> overrides = {},
                              bool small = false);

ExperimentConfig load_config(const std::string& path,
                             std::span<const std::string> overrides = {},
                             bool small = false);

/// Throws ConfigError if any field is out of range.
void validate(const ExperimentConfig& cfg);

/// Canonical INI rendering of a fully resolved config; parse_config of the
/// result reproduces `cfg`.
std::string to_ini(const ExperimentConfig& cfg);

/// Stable 16-hex-digit hash of to_ini(cfg).
std::string config_fingerprint(const ExperimentConfig& cfg);

}  // namespace bisep

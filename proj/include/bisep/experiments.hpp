#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bisep/config.hpp"
#include "bisep/profiles.hpp"

namespace bisep {

struct TrialRecord {
  std::string experiment;  // m_sweep, heatmap, ...
  std::string cell;        // fixed coordinates of a multi-axis cell, may be empty
  std::string sweep_axis;
  double sweep_value = 0.0;
  Method method = Method::BiSep;
  Index trial = 0;
  double err_u = 1.0;
  double err_v = 1.0;
  double err_max = 1.0;
  double runtime_s = 0.0;
  std::uint64_t seed = 0;  // per-trial seed all methods share
  std::string flag = "ok";  // ok | nonconverged | degenerate | failed:<reason>
  std::string fingerprint;

  // "heatmap[alpha_u=0.5]" style label used as the CSV experiment column.
  std::string label() const { return cell.empty() ? experiment : experiment + "[" + cell + "]"; }
  bool excluded() const { return flag == "degenerate" || flag.rfind("failed", 0) == 0; }
};

std::vector<TrialRecord> run_m_sweep(const ExperimentConfig& cfg);
std::vector<TrialRecord> run_phase_heatmap(const ExperimentConfig& cfg);
std::vector<TrialRecord> run_kv_decoupling(const ExperimentConfig& cfg);
std::vector<TrialRecord> run_rho_table(const ExperimentConfig& cfg);

/// Dispatches on cfg.experiment.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg);

/// Order-only sample-size overlay: C1 * max_t (t_u + t_v) s_u(t_u) s_v(t_v) ln n
/// with C1 = (1 + rho)^2 / (rho^2 gamma^2 (1 - sqrt(gamma))^2) and the
/// universal constant set to 1.
double predict_required_m(const SignalProfile& profile_u, const SignalProfile& profile_v,
                          Index k_u, Index k_v, Index n, double gamma, double rho);

struct SummaryRow {
  std::string label;  // TrialRecord::label()
  std::string sweep_axis;
  double sweep_value = 0.0;
  Method method = Method::BiSep;
  Index count = 0;   // records entering the means
  Index failed = 0;  // excluded records
  double mean_err_u = 0.0, std_err_u = 0.0;
  double mean_err_v = 0.0, std_err_v = 0.0;
  double mean_err_max = 0.0, std_err_max = 0.0;
};

/// Per-(label, sweep value, method) mean and sample standard deviation
/// (n - 1 denominator; 0 for a single record). Failed and degenerate
/// records are counted in `failed` only.
std::vector<SummaryRow> aggregate(const std::vector<TrialRecord>& records);

}  // namespace bisep

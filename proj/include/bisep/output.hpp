#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bisep/config.hpp"
#include "bisep/experiments.hpp"

namespace bisep {

/// CSV with header
///   experiment,sweep_axis,sweep_value,method,trial,err_u,err_v,err_max,runtime_s,seed,flag
/// rows sorted by (sweep_value, method, trial, experiment label), floats
/// with 17 significant digits. With timing = false, runtime_s is written as 0.
void write_records_csv(std::ostream& os, std::vector<TrialRecord> records, bool timing = true);
void emit_csv(const std::vector<TrialRecord>& records, const std::string& path,
              bool timing = true);

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
void emit_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path);

/// Writes a 17-significant-digit rendering of x.
std::string format_double(double x);

struct RunManifest {
  std::string artifact_version;
  std::string command;
  ExperimentConfig config;
  std::string started_utc;
  std::string finished_utc;
  std::map<std::string, long long> cell_counts;  // "label|sweep_value|method" -> records
  std::vector<std::string> outputs;
};

std::string manifest_json(const RunManifest& manifest);
void write_manifest(const RunManifest& manifest, const std::string& path);

std::map<std::string, long long> count_cells(const std::vector<TrialRecord>& records);

/// Current UTC time as ISO-8601.
std::string utc_now();

extern const char* const kArtifactVersion;

}  // namespace bisep

#include "bisep/output.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

namespace bisep {

const char* const kArtifactVersion = "0.1.0";

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

void write_records_csv(std::ostream& os, std::vector<TrialRecord> records, bool timing) {
  std::stable_sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return std::make_tuple(a.sweep_value, static_cast<int>(a.method), a.trial, a.label()) <
           std::make_tuple(b.sweep_value, static_cast<int>(b.method), b.trial, b.label());
  });
  os << "experiment,sweep_axis,sweep_value,method,trial,err_u,err_v,err_max,runtime_s,seed,flag\n";
  for (const TrialRecord& r : records) {
    os << r.label() << ',' << r.sweep_axis << ',' << format_double(r.sweep_value) << ','
       << method_name(r.method) << ',' << r.trial << ',' << format_double(r.err_u) << ','
       << format_double(r.err_v) << ',' << format_double(r.err_max) << ','
       << format_double(timing ? r.runtime_s : 0.0) << ',' << r.seed << ',' << r.flag << '\n';
  }
}

void emit_csv(const std::vector<TrialRecord>& records, const std::string& path, bool timing) {
  std::ofstream out = open_for_write(path);
  write_records_csv(out, records, timing);
  finish(out, path);
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "experiment,sweep_axis,sweep_value,method,count,failed,mean_err_u,std_err_u,"
        "mean_err_v,std_err_v,mean_err_max,std_err_max\n";
  for (const SummaryRow& r : rows) {
    os << r.label << ',' << r.sweep_axis << ',' << format_double(r.sweep_value) << ','
       << method_name(r.method) << ',' << r.count << ',' << r.failed << ','
       << format_double(r.mean_err_u) << ',' << format_double(r.std_err_u) << ','
       << format_double(r.mean_err_v) << ',' << format_double(r.std_err_v) << ','
       << format_double(r.mean_err_max) << ',' << format_double(r.std_err_max) << '\n';
  }
}

void emit_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
  std::ofstream out = open_for_write(path);
  write_summary_csv(out, rows);
  finish(out, path);
}

std::map<std::string, long long> count_cells(const std::vector<TrialRecord>& records) {
  std::map<std::string, long long> counts;
  for (const TrialRecord& r : records) {
    ++counts[r.label() + "|" + format_double(r.sweep_value) + "|" + method_name(r.method)];
  }
  return counts;
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["artifact_version"] = m.artifact_version;
  j["command"] = m.command;
  j["experiment"] = experiment_name(m.config.experiment);
  j["base_seed"] = m.config.base_seed;
  j["config_fingerprint"] = config_fingerprint(m.config);
  j["config_ini"] = to_ini(m.config);
  j["started_utc"] = m.started_utc;
  j["finished_utc"] = m.finished_utc;
  j["cell_counts"] = m.cell_counts;
  j["outputs"] = m.outputs;
  return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << manifest_json(manifest);
  finish(out, path);
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace bisep

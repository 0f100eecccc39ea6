#include "bisep/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <regex>
#include <sstream>

#include <CLI11.hpp>

#include "bisep/config.hpp"
#include "bisep/experiments.hpp"
#include "bisep/output.hpp"
#include "bisep/profiles.hpp"
#include "bisep/verify.hpp"

namespace bisep {

namespace {

struct RunOptions {
  std::string config_path;
  std::vector<std::string> sets;
  bool small = false;
  std::string out_dir;
  long long trials = -1;
  std::string seed;
  long long threads = -1;
  bool no_timing = false;
};

void add_run_options(CLI::App* sub, RunOptions& o) {
  sub->add_option("-c,--config", o.config_path, "INI config file")->check(CLI::ExistingFile);
  sub->add_option("--set", o.sets, "Override, e.g. model.rho=0.7 (repeatable)");
  sub->add_flag("--small", o.small, "Reduced preset: n=300, k=10, m in {200..3000}");
  sub->add_option("-o,--out", o.out_dir, "Output directory (default $BISEP_OUT_DIR or ./results)");
  sub->add_option("--trials", o.trials, "Monte Carlo trials per cell");
  sub->add_option("--seed", o.seed, "Base seed");
  sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  sub->add_flag("--no-timing", o.no_timing, "Write runtime_s = 0 for byte-stable CSVs");
}

std::string resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("BISEP_OUT_DIR"); env && *env) return env;
  return "results";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig build_config(ExperimentKind kind, const RunOptions& o) {
  std::string text = o.config_path.empty() ? std::string() : slurp(o.config_path);
  std::vector<std::string> overrides;
  static const std::regex has_experiment(R"((^|\n)\s*experiment\s*=)");
  if (!std::regex_search(text, has_experiment)) {
    overrides.push_back("experiment=" + experiment_name(kind));
  }
  overrides.insert(overrides.end(), o.sets.begin(), o.sets.end());
  if (o.trials >= 0) overrides.push_back("run.trials=" + std::to_string(o.trials));
  if (!o.seed.empty()) overrides.push_back("run.base_seed=" + o.seed);
  if (o.threads >= 0) overrides.push_back("run.threads=" + std::to_string(o.threads));
  if (o.no_timing) overrides.push_back("run.timing=false");
  ExperimentConfig cfg = parse_config(text, overrides, o.small);
  if (cfg.experiment != kind) {
    throw ConfigError("experiment", "config names '" + experiment_name(cfg.experiment) +
                                        "' but the subcommand runs '" + experiment_name(kind) + "'");
  }
  return cfg;
}

int run_experiment_command(ExperimentKind kind, const RunOptions& o, const std::string& command,
                           std::ostream& out) {
  const ExperimentConfig cfg = build_config(kind, o);
  const std::filesystem::path dir = resolve_out_dir(o.out_dir);
  std::filesystem::create_directories(dir);
  const std::string name = experiment_name(kind);

  RunManifest manifest;
  manifest.artifact_version = kArtifactVersion;
  manifest.command = command;
  manifest.config = cfg;
  manifest.started_utc = utc_now();
  const std::vector<TrialRecord> records = run_experiment(cfg);
  manifest.finished_utc = utc_now();
  manifest.cell_counts = count_cells(records);

  const std::string csv = (dir / (name + ".csv")).string();
  const std::string summary = (dir / (name + "_summary.csv")).string();
  const std::string man = (dir / (name + "_manifest.json")).string();
  const std::vector<SummaryRow> rows = aggregate(records);
  emit_csv(records, csv, cfg.timing);
  emit_summary_csv(rows, summary);
  manifest.outputs = {csv, summary};
  write_manifest(manifest, man);

  out << "# " << name << ": " << records.size() << " records\n";
  out << std::left << std::setw(28) << "cell" << std::setw(12) << "sweep" << std::setw(15) << "method"
      << std::setw(8) << "count" << std::setw(12) << "err_max" << "std\n";
  for (const SummaryRow& r : rows) {
    std::ostringstream sweep;
    sweep << r.sweep_axis << "=" << r.sweep_value;
    out << std::left << std::setw(28) << r.label << std::setw(12) << sweep.str() << std::setw(15)
        << method_name(r.method) << std::setw(8) << r.count << std::setw(12) << std::fixed
        << std::setprecision(4) << r.mean_err_max << r.std_err_max << std::defaultfloat << "\n";
  }
  out << "wrote " << csv << "\n      " << summary << "\n      " << man << "\n";
  long long failed = 0;
  for (const TrialRecord& r : records) failed += r.excluded() ? 1 : 0;
  if (failed > 0) out << "note: " << failed << " failed/degenerate records excluded from means\n";
  return 0;
}

struct PredictOptions {
  std::string profile_u = "flat";
  std::string profile_v = "flat";
  std::string versus_u = "exponential";
  std::string versus_v = "exponential";
  long long k = 20;
  long long k_u = -1;
  long long k_v = -1;
  long long n = 1000;
  double gamma = 0.5;
  double rho = 0.8;
};

int run_predict(const PredictOptions& p, std::ostream& out) {
  const Index k_u = p.k_u > 0 ? p.k_u : p.k;
  const Index k_v = p.k_v > 0 ? p.k_v : p.k;
  const SignalProfile a_u = SignalProfile::parse(p.profile_u);
  const SignalProfile a_v = SignalProfile::parse(p.profile_v);
  const SignalProfile b_u = SignalProfile::parse(p.versus_u);
  const SignalProfile b_v = SignalProfile::parse(p.versus_v);
  const double first = predict_required_m(a_u, a_v, k_u, k_v, p.n, p.gamma, p.rho);
  const double second = predict_required_m(b_u, b_v, k_u, k_v, p.n, p.gamma, p.rho);
  auto describe = [&](const SignalProfile& u, const SignalProfile& v, double value) {
    const auto su = structure_sequence(u, k_u);
    const auto sv = structure_sequence(v, k_v);
    const ComplexityPeak peak = complexity_term(su, sv, k_u, k_v, p.n);
    out << u.to_string() << "/" << v.to_string() << ": predicted m = " << format_double(value)
        << " (peak at t = " << peak.argmax_t << ")";
    auto rate = [](const SignalProfile& s) -> double {
      return s.kind == ProfileKind::Flat ? 0.0 : s.alpha;
    };
    if (u.kind != ProfileKind::Exponential && v.kind != ProfileKind::Exponential) {
      const PhaseExponent ph = phase_exponent(rate(u), rate(v));
      out << ", tau = " << ph.tau << (ph.boundary_log_penalty ? " (+log k)" : "");
    }
    out << "\n";
  };
  out << "k_u = " << k_u << ", k_v = " << k_v << ", n = " << p.n << ", gamma = " << p.gamma
      << ", rho = " << p.rho << " (universal constant C = 1, natural log)\n";
  describe(a_u, a_v, first);
  describe(b_u, b_v, second);
  out << "ratio = " << format_double(first / second) << "\n";
  return 0;
}

int run_verify(std::uint64_t seed, std::ostream& out) {
  bool ok = true;
  for (const CheckResult& c : run_verification(seed)) {
    out << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  (" << c.detail << ")\n";
    ok = ok && c.passed;
  }
  out << (ok ? "all checks passed\n" : "verification FAILED\n");
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse canonical pair recovery: stagewise pursuit vs truncated power"};
  app.name(args.empty() ? "bisep" : args.front());
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    ExperimentKind kind;
    const char* help;
  };
  const Entry entries[] = {
      {"m-sweep", ExperimentKind::MSweep, "Error versus sample size m"},
      {"heatmap", ExperimentKind::Heatmap, "Error over a grid of decay-rate pairs"},
      {"kv-decoupling", ExperimentKind::KvDecoupling, "Per-view error versus k_v"},
      {"rho-table", ExperimentKind::RhoTable, "Error versus correlation level per profile"},
  };
  RunOptions run_opts;
  std::vector<std::pair<CLI::App*, ExperimentKind>> experiment_cmds;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_run_options(sub, run_opts);
    experiment_cmds.emplace_back(sub, e.kind);
  }

  PredictOptions pred;
  CLI::App* predict = app.add_subcommand("predict", "Theory overlay for two profile pairs");
  predict->add_option("--profile-u", pred.profile_u, "flat | powerlaw:<a> | exponential");
  predict->add_option("--profile-v", pred.profile_v);
  predict->add_option("--versus-u", pred.versus_u);
  predict->add_option("--versus-v", pred.versus_v);
  predict->add_option("-k,--k", pred.k, "Sparsity of both views");
  predict->add_option("--k-u", pred.k_u);
  predict->add_option("--k-v", pred.k_v);
  predict->add_option("-n,--n", pred.n, "Ambient dimension");
  predict->add_option("--gamma", pred.gamma, "Approximation tolerance in (0,1)");
  predict->add_option("--rho", pred.rho, "Canonical correlation in (0,1)");

  std::uint64_t verify_seed = 7;
  CLI::App* verify = app.add_subcommand("verify", "Run the property/invariant self-checks");
  verify->add_option("--seed", verify_seed);

  std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  std::string command;
  for (const std::string& a : args) command += (command.empty() ? "" : " ") + a;

  try {
    for (auto& [sub, kind] : experiment_cmds) {
      if (sub->parsed()) return run_experiment_command(kind, run_opts, command, out);
    }
    if (predict->parsed()) return run_predict(pred, out);
    if (verify->parsed()) return run_verify(verify_seed, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace bisep

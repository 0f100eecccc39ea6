#include "bisep/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "bisep/estimators.hpp"
#include "bisep/model.hpp"
#include "bisep/rng.hpp"

namespace bisep {

namespace {

constexpr std::uint64_t kTrialSalt = 0x7c3b5a1d2e4f6089ULL;

// One point of a sweep: everything needed to draw and solve a trial.
struct Cell {
  std::string cell_label;
  std::string axis;
  double value = 0.0;
  Index n1 = 0, n2 = 0, k_u = 0, k_v = 0, m = 0;
  double rho = 0.0;
  SignalProfile pu, pv;
  std::vector<std::uint64_t> key;  // identifies the cell for seeding
};

std::string fmt_short(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

Cell base_cell(const ExperimentConfig& cfg) {
  Cell c;
  c.n1 = cfg.n1;
  c.n2 = cfg.n2;
  c.k_u = cfg.k_u;
  c.k_v = cfg.k_v;
  c.m = cfg.m;
  c.rho = cfg.rho;
  c.pu = cfg.profile_u;
  c.pv = cfg.profile_v;
  return c;
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, const Cell& cell, Index trial) {
  std::vector<std::uint64_t> words;
  words.reserve(cell.key.size() + 3);
  words.push_back(cfg.base_seed);
  words.insert(words.end(), cell.key.begin(), cell.key.end());
  words.push_back(static_cast<std::uint64_t>(trial));
  words.push_back(kTrialSalt);
  return hash_words(words);
}

std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, const Cell& cell, Index trial,
                                   const std::string& fingerprint) {
  const std::uint64_t seed = trial_seed(cfg, cell, trial);
  std::vector<TrialRecord> out;
  for (Method method : cfg.methods) {
    TrialRecord rec;
    rec.experiment = experiment_name(cfg.experiment);
    rec.cell = cell.cell_label;
    rec.sweep_axis = cell.axis;
    rec.sweep_value = cell.value;
    rec.method = method;
    rec.trial = trial;
    rec.seed = seed;
    rec.fingerprint = fingerprint;
    out.push_back(std::move(rec));
  }

  try {
    // Signals and samples are shared by every method in the trial.
    SparseSignal u = generate_signal(cell.pu, cell.k_u, cell.n1,
                                     SupportRule::seeded_random(stream_seed(seed, 1)));
    SparseSignal v = generate_signal(cell.pv, cell.k_v, cell.n2,
                                     SupportRule::seeded_random(stream_seed(seed, 2)));
    const CanonicalModel model(std::move(u), std::move(v), cell.rho);
    const EmpiricalCrossCov emp = sample_empirical_cov(model, cell.m, stream_seed(seed, 3));

    for (TrialRecord& rec : out) {
      try {
        const auto t0 = std::chrono::steady_clock::now();
        EstimateResult res;
        if (rec.method == Method::BiSep) {
          res = bi_sep(emp, cell.k_u, cell.k_v);
        } else {
          TPowerOptions opts;
          opts.num_restarts = rec.method == Method::TPower ? cfg.tpower_restarts : 1;
          opts.max_iters = cfg.tpower_max_iters;
          opts.seed = stream_seed(seed, 4);
          res = tpower_scca(emp, cell.k_u, cell.k_v, opts);
        }
        const auto t1 = std::chrono::steady_clock::now();
        rec.runtime_s = std::max(std::chrono::duration<double>(t1 - t0).count(), 1e-9);
        const EstimationError e = estimation_error(res, model);
        rec.err_u = e.err_u;
        rec.err_v = e.err_v;
        rec.err_max = e.err_max;
        if (res.degenerate) {
          rec.flag = "degenerate";
        } else if (!res.converged) {
          rec.flag = "nonconverged";
        }
      } catch (const std::exception& ex) {
        rec.flag = std::string("failed:") + ex.what();
        rec.runtime_s = 1e-9;
      }
    }
  } catch (const std::exception& ex) {
    for (TrialRecord& rec : out) {
      rec.flag = std::string("failed:") + ex.what();
      rec.runtime_s = 1e-9;
    }
  }
  for (TrialRecord& rec : out) {
    std::replace(rec.flag.begin(), rec.flag.end(), ',', ';');
    std::replace(rec.flag.begin(), rec.flag.end(), '\n', ' ');
  }
  return out;
}

// Runs cells x trials as independent tasks. Output order is task order, so
// it does not depend on the number of workers.
std::vector<TrialRecord> run_cells(const ExperimentConfig& cfg, const std::vector<Cell>& cells) {
  validate(cfg);
  const std::string fp = config_fingerprint(cfg);
  const std::size_t n_tasks = cells.size() * static_cast<std::size_t>(cfg.trials);
  std::vector<std::vector<TrialRecord>> slots(n_tasks);

  auto task = [&](std::size_t i) {
    const Cell& cell = cells[i / static_cast<std::size_t>(cfg.trials)];
    const Index trial = static_cast<Index>(i % static_cast<std::size_t>(cfg.trials));
    slots[i] = run_trial(cfg, cell, trial, fp);
  };

  unsigned workers = cfg.threads == 0 ? std::thread::hardware_concurrency() : cfg.threads;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_tasks)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n_tasks; i = next++) task(i);
      });
    }
  }

  std::vector<TrialRecord> out;
  out.reserve(n_tasks * cfg.methods.size());
  for (auto& s : slots)
    for (auto& r : s) out.push_back(std::move(r));
  return out;
}

void expect_kind(const ExperimentConfig& cfg, ExperimentKind kind) {
  if (cfg.experiment != kind) {
    throw std::invalid_argument("config is for '" + experiment_name(cfg.experiment) +
                                "', expected '" + experiment_name(kind) + "'");
  }
}

}  // namespace

std::vector<TrialRecord> run_m_sweep(const ExperimentConfig& cfg) {
  expect_kind(cfg, ExperimentKind::MSweep);
  std::vector<Cell> cells;
  for (Index m : cfg.m_grid) {
    Cell c = base_cell(cfg);
    c.axis = "m";
    c.value = static_cast<double>(m);
    c.m = m;
    c.key = {static_cast<std::uint64_t>(m)};
    cells.push_back(std::move(c));
  }
  return run_cells(cfg, cells);
}

std::vector<TrialRecord> run_phase_heatmap(const ExperimentConfig& cfg) {
  expect_kind(cfg, ExperimentKind::Heatmap);
  std::vector<Cell> cells;
  for (auto [au, av] : cfg.alpha_grid) {
    Cell c = base_cell(cfg);
    c.cell_label = "alpha_u=" + fmt_short(au);
    c.axis = "alpha_v";
    c.value = av;
    c.pu = SignalProfile::power_law(au);
    c.pv = SignalProfile::power_law(av);
    c.key = {double_bits(au), double_bits(av)};
    cells.push_back(std::move(c));
  }
  return run_cells(cfg, cells);
}

std::vector<TrialRecord> run_kv_decoupling(const ExperimentConfig& cfg) {
  expect_kind(cfg, ExperimentKind::KvDecoupling);
  std::vector<Cell> cells;
  for (Index kv : cfg.kv_grid) {
    Cell c = base_cell(cfg);
    c.axis = "k_v";
    c.value = static_cast<double>(kv);
    c.k_v = kv;
    c.key = {static_cast<std::uint64_t>(kv)};
    cells.push_back(std::move(c));
  }
  return run_cells(cfg, cells);
}

std::vector<TrialRecord> run_rho_table(const ExperimentConfig& cfg) {
  expect_kind(cfg, ExperimentKind::RhoTable);
  std::vector<Cell> cells;
  for (const SignalProfile& p : cfg.table_profiles) {
    for (double rho : cfg.rho_grid) {
      Cell c = base_cell(cfg);
      c.cell_label = p.to_string();
      c.axis = "rho";
      c.value = rho;
      c.rho = rho;
      c.pu = p;
      c.pv = p;
      c.key = {double_bits(rho), static_cast<std::uint64_t>(p.kind), double_bits(p.alpha)};
      cells.push_back(std::move(c));
    }
  }
  return run_cells(cfg, cells);
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::MSweep:
      return run_m_sweep(cfg);
    case ExperimentKind::Heatmap:
      return run_phase_heatmap(cfg);
    case ExperimentKind::KvDecoupling:
      return run_kv_decoupling(cfg);
    case ExperimentKind::RhoTable:
      return run_rho_table(cfg);
  }
  throw std::invalid_argument("unknown experiment");
}

double predict_required_m(const SignalProfile& profile_u, const SignalProfile& profile_v,
                          Index k_u, Index k_v, Index n, double gamma, double rho) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("predict_required_m: gamma must lie in (0,1)");
  }
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("predict_required_m: rho must lie in (0,1)");
  }
  const std::vector<double> su = structure_sequence(profile_u, k_u);
  const std::vector<double> sv = structure_sequence(profile_v, k_v);
  const ComplexityPeak peak = complexity_term(su, sv, k_u, k_v, n);
  const double g = 1.0 - std::sqrt(gamma);
  const double c1 = (1.0 + rho) * (1.0 + rho) / (rho * rho * gamma * gamma * g * g);
  return c1 * peak.value;
}

std::vector<SummaryRow> aggregate(const std::vector<TrialRecord>& records) {
  struct Acc {
    SummaryRow row;
    std::vector<double> eu, ev, em;
  };
  using Key = std::tuple<std::string, double, int>;
  std::map<Key, Acc> groups;
  for (const TrialRecord& r : records) {
    auto& acc = groups[Key{r.label(), r.sweep_value, static_cast<int>(r.method)}];
    acc.row.label = r.label();
    acc.row.sweep_axis = r.sweep_axis;
    acc.row.sweep_value = r.sweep_value;
    acc.row.method = r.method;
    if (r.excluded()) {
      ++acc.row.failed;
      continue;
    }
    acc.eu.push_back(r.err_u);
    acc.ev.push_back(r.err_v);
    acc.em.push_back(r.err_max);
  }
  auto stats = [](const std::vector<double>& x, double& mean, double& sd) {
    mean = 0.0;
    sd = 0.0;
    if (x.empty()) return;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    if (x.size() < 2) return;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
  };
  std::vector<SummaryRow> out;
  out.reserve(groups.size());
  for (auto& [_, acc] : groups) {
    acc.row.count = static_cast<Index>(acc.em.size());
    stats(acc.eu, acc.row.mean_err_u, acc.row.std_err_u);
    stats(acc.ev, acc.row.mean_err_v, acc.row.std_err_v);
    stats(acc.em, acc.row.mean_err_max, acc.row.std_err_max);
    out.push_back(std::move(acc.row));
  }
  return out;
}

}  // namespace bisep

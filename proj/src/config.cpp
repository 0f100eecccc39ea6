#include "bisep/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bisep/rng.hpp"

namespace bisep {

namespace pt = boost::property_tree;

std::string method_name(Method m) {
  switch (m) {
    case Method::BiSep:
      return "bisep";
    case Method::TPower:
      return "tpower";
    case Method::TPowerSingle:
      return "tpower_single";
  }
  return "bisep";
}

Method parse_method(const std::string& name) {
  if (name == "bisep") return Method::BiSep;
  if (name == "tpower") return Method::TPower;
  if (name == "tpower_single") return Method::TPowerSingle;
  throw std::invalid_argument("unknown method '" + name + "' (bisep, tpower, tpower_single)");
}

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::MSweep:
      return "m_sweep";
    case ExperimentKind::Heatmap:
      return "heatmap";
    case ExperimentKind::KvDecoupling:
      return "kv_decoupling";
    case ExperimentKind::RhoTable:
      return "rho_table";
  }
  return "m_sweep";
}

ExperimentKind parse_experiment(const std::string& raw) {
  std::string name = raw;
  std::replace(name.begin(), name.end(), '-', '_');
  if (name == "m_sweep") return ExperimentKind::MSweep;
  if (name == "heatmap") return ExperimentKind::Heatmap;
  if (name == "kv_decoupling") return ExperimentKind::KvDecoupling;
  if (name == "rho_table") return ExperimentKind::RhoTable;
  throw std::invalid_argument("unknown experiment '" + raw +
                              "' (m_sweep, heatmap, kv_decoupling, rho_table)");
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::MSweep:
      c.m_grid = {250, 500, 1000, 2000, 4000, 8000};
      c.methods = {Method::BiSep, Method::TPower, Method::TPowerSingle};
      break;
    case ExperimentKind::Heatmap:
      for (int i = 0; i <= 8; ++i)
        for (int j = 0; j <= 8; ++j) c.alpha_grid.emplace_back(0.25 * i, 0.25 * j);
      c.methods = {Method::BiSep};
      break;
    case ExperimentKind::KvDecoupling:
      c.k_u = 10;
      c.profile_u = SignalProfile::flat();
      c.profile_v = SignalProfile::power_law(3.0);
      c.kv_grid = {10, 20, 30, 40, 50};
      c.methods = {Method::BiSep, Method::TPower};
      break;
    case ExperimentKind::RhoTable:
      c.rho_grid = {0.3, 0.5, 0.7, 0.9};
      // alpha = 1 for the power-law family; see README
      c.table_profiles = {SignalProfile::flat(), SignalProfile::power_law(1.0),
                          SignalProfile::exponential()};
      c.methods = {Method::BiSep, Method::TPower};
      break;
  }
  return c;
}

void apply_small_preset(ExperimentConfig& c) {
  c.n1 = c.n2 = 300;
  c.k_u = c.k_v = 10;
  c.m = 1000;
  c.m_grid = {200, 500, 1000, 2000, 3000};
  if (c.experiment == ExperimentKind::KvDecoupling) {
    c.k_u = 5;
    c.kv_grid = {5, 10, 15, 20, 25};
  }
}

namespace {

std::string trim(std::string s) {
  auto ws = [](unsigned char ch) { return std::isspace(ch) != 0; };
  while (!s.empty() && ws(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && ws(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  T value{};
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || t.empty()) {
    throw ConfigError(field, "cannot parse '" + text + "' as a number");
  }
  return value;
}

Index parse_count(const std::string& field, const std::string& text) {
  return static_cast<Index>(parse_number<long long>(field, text));
}

bool parse_bool(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(field, "expected true/false, got '" + text + "'");
}

template <class Fn>
auto wrap(const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(field, e.what());
  }
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char shorter[64];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, x);
    if (std::strtod(shorter, nullptr) == x) return shorter;
  }
  return buf;
}

// Ordered so that aliases (n, k) are applied before the specific keys.
const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "experiment",
      "model.n",           "model.k",           "model.n1",         "model.n2",
      "model.k_u",         "model.k_v",         "model.rho",        "model.m",
      "model.profile_u",   "model.profile_v",   "sweep.m_grid",     "sweep.alpha_grid",
      "sweep.kv_grid",     "sweep.rho_grid",    "sweep.table_profiles",
      "run.trials",        "run.base_seed",     "run.methods",      "run.tpower_restarts",
      "run.tpower_max_iters", "run.threads",    "run.timing"};
  return keys;
}

void apply_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (key == "model.n") {
    c.n1 = c.n2 = parse_count(key, value);
  } else if (key == "model.k") {
    c.k_u = c.k_v = parse_count(key, value);
  } else if (key == "model.n1") {
    c.n1 = parse_count(key, value);
  } else if (key == "model.n2") {
    c.n2 = parse_count(key, value);
  } else if (key == "model.k_u") {
    c.k_u = parse_count(key, value);
  } else if (key == "model.k_v") {
    c.k_v = parse_count(key, value);
  } else if (key == "model.rho") {
    c.rho = parse_number<double>(key, value);
  } else if (key == "model.m") {
    c.m = parse_count(key, value);
  } else if (key == "model.profile_u") {
    c.profile_u = wrap(key, [&] { return SignalProfile::parse(trim(value)); });
  } else if (key == "model.profile_v") {
    c.profile_v = wrap(key, [&] { return SignalProfile::parse(trim(value)); });
  } else if (key == "sweep.m_grid") {
    c.m_grid.clear();
    for (const auto& s : split_list(value)) c.m_grid.push_back(parse_count(key, s));
  } else if (key == "sweep.kv_grid") {
    c.kv_grid.clear();
    for (const auto& s : split_list(value)) c.kv_grid.push_back(parse_count(key, s));
  } else if (key == "sweep.rho_grid") {
    c.rho_grid.clear();
    for (const auto& s : split_list(value)) c.rho_grid.push_back(parse_number<double>(key, s));
  } else if (key == "sweep.alpha_grid") {
    c.alpha_grid.clear();
    for (const auto& s : split_list(value)) {
      const auto colon = s.find(':');
      if (colon == std::string::npos) {
        throw ConfigError(key, "expected alpha_u:alpha_v pairs, got '" + s + "'");
      }
      c.alpha_grid.emplace_back(parse_number<double>(key, s.substr(0, colon)),
                                parse_number<double>(key, s.substr(colon + 1)));
    }
  } else if (key == "sweep.table_profiles") {
    c.table_profiles.clear();
    for (const auto& s : split_list(value))
      c.table_profiles.push_back(wrap(key, [&] { return SignalProfile::parse(s); }));
  } else if (key == "run.trials") {
    c.trials = parse_count(key, value);
  } else if (key == "run.base_seed") {
    c.base_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "run.methods") {
    c.methods.clear();
    for (const auto& s : split_list(value))
      c.methods.push_back(wrap(key, [&] { return parse_method(s); }));
  } else if (key == "run.tpower_restarts") {
    c.tpower_restarts = parse_count(key, value);
  } else if (key == "run.tpower_max_iters") {
    c.tpower_max_iters = parse_count(key, value);
  } else if (key == "run.threads") {
    const Index t = parse_count(key, value);
    if (t < 0) throw ConfigError(key, "must be >= 0");
    c.threads = static_cast<unsigned>(t);
  } else if (key == "run.timing") {
    c.timing = parse_bool(key, value);
  }
}

}  // namespace

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const char* field, const std::string& what) {
    if (!ok) throw ConfigError(field, what);
  };
  require(c.n1 >= 2, "model.n1", "must be >= 2");
  require(c.n2 >= 2, "model.n2", "must be >= 2");
  require(c.k_u >= 1, "model.k_u", "sparsity must be >= 1");
  require(c.k_v >= 1, "model.k_v", "sparsity must be >= 1");
  require(c.k_u <= c.n1, "model.k_u", "must not exceed n1");
  require(c.k_v <= c.n2, "model.k_v", "must not exceed n2");
  require(c.rho > 0.0 && c.rho < 1.0, "model.rho", "rho must lie in (0,1)");
  require(c.m >= 1, "model.m", "must be >= 1");
  require(c.trials >= 1, "run.trials", "must be >= 1");
  require(!c.methods.empty(), "run.methods", "at least one method required");
  require(c.tpower_restarts >= 1, "run.tpower_restarts", "must be >= 1");
  require(c.tpower_max_iters >= 1, "run.tpower_max_iters", "must be >= 1");
  switch (c.experiment) {
    case ExperimentKind::MSweep:
      require(!c.m_grid.empty(), "sweep.m_grid", "must be nonempty for m_sweep");
      for (Index m : c.m_grid) require(m >= 1, "sweep.m_grid", "sample sizes must be >= 1");
      break;
    case ExperimentKind::Heatmap:
      require(!c.alpha_grid.empty(), "sweep.alpha_grid", "must be nonempty for heatmap");
      for (auto [a, b] : c.alpha_grid)
        require(a >= 0.0 && b >= 0.0 && std::isfinite(a) && std::isfinite(b),
                "sweep.alpha_grid", "decay rates must be finite and >= 0");
      break;
    case ExperimentKind::KvDecoupling:
      require(!c.kv_grid.empty(), "sweep.kv_grid", "must be nonempty for kv_decoupling");
      for (Index k : c.kv_grid)
        require(k >= 1 && k <= c.n2, "sweep.kv_grid", "values must lie in [1, n2]");
      break;
    case ExperimentKind::RhoTable:
      require(!c.rho_grid.empty(), "sweep.rho_grid", "must be nonempty for rho_table");
      require(!c.table_profiles.empty(), "sweep.table_profiles", "must be nonempty");
      for (double r : c.rho_grid)
        require(r > 0.0 && r < 1.0, "sweep.rho_grid", "rho must lie in (0,1)");
      break;
  }
}

ExperimentConfig parse_config(const std::string& ini_text,
                              std::span<const std::string> overrides, bool small) {
  pt::ptree tree;
  {
    std::istringstream in(ini_text);
    try {
      pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError("config", std::string("malformed file: ") + e.what());
    }
  }

  // Flatten to dotted keys, section order irrelevant.
  std::map<std::string, std::string> values;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      values[name] = node.data();
      continue;
    }
    for (const auto& [key, leaf] : node) {
      if (!leaf.empty()) throw ConfigError(name + "." + key, "nested sections are not allowed");
      values[name + "." + key] = leaf.data();
    }
  }
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw ConfigError(ov, "override must look like key=value");
    values[trim(ov.substr(0, eq))] = trim(ov.substr(eq + 1));
  }

  const auto& keys = known_keys();
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [key, _] : values) {
    if (!known.count(key)) throw ConfigError(key, "unknown key");
  }
  const auto exp_it = values.find("experiment");
  if (exp_it == values.end()) throw ConfigError("experiment", "missing");
  const ExperimentKind kind =
      wrap("experiment", [&] { return parse_experiment(trim(exp_it->second)); });

  ExperimentConfig cfg = default_config(kind);
  if (small) apply_small_preset(cfg);
  for (const std::string& key : keys) {
    if (key == "experiment") continue;
    const auto it = values.find(key);
    if (it != values.end()) apply_key(cfg, key, it->second);
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path, std::span<const std::string> overrides,
                             bool small) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides, small);
}

std::string to_ini(const ExperimentConfig& c) {
  std::ostringstream os;
  auto join = [](const auto& items, auto&& fmt) {
    std::string s;
    for (const auto& it : items) {
      if (!s.empty()) s += ",";
      s += fmt(it);
    }
    return s;
  };
  auto count = [](Index x) { return std::to_string(x); };
  os << "experiment = " << experiment_name(c.experiment) << "\n\n";
  os << "[model]\n"
     << "n1 = " << c.n1 << "\n"
     << "n2 = " << c.n2 << "\n"
     << "k_u = " << c.k_u << "\n"
     << "k_v = " << c.k_v << "\n"
     << "rho = " << fmt_double(c.rho) << "\n"
     << "m = " << c.m << "\n"
     << "profile_u = " << c.profile_u.to_string() << "\n"
     << "profile_v = " << c.profile_v.to_string() << "\n\n";
  os << "[sweep]\n"
     << "m_grid = " << join(c.m_grid, count) << "\n"
     << "alpha_grid = "
     << join(c.alpha_grid,
             [](const std::pair<double, double>& p) {
               return fmt_double(p.first) + ":" + fmt_double(p.second);
             })
     << "\n"
     << "kv_grid = " << join(c.kv_grid, count) << "\n"
     << "rho_grid = " << join(c.rho_grid, [](double r) { return fmt_double(r); }) << "\n"
     << "table_profiles = "
     << join(c.table_profiles, [](const SignalProfile& p) { return p.to_string(); }) << "\n\n";
  os << "[run]\n"
     << "trials = " << c.trials << "\n"
     << "base_seed = " << c.base_seed << "\n"
     << "methods = " << join(c.methods, [](Method m) { return method_name(m); }) << "\n"
     << "tpower_restarts = " << c.tpower_restarts << "\n"
     << "tpower_max_iters = " << c.tpower_max_iters << "\n"
     << "threads = " << c.threads << "\n"
     << "timing = " << (c.timing ? "true" : "false") << "\n";
  return os.str();
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
  // Thread count and timing do not change results.
  ExperimentConfig canon = cfg;
  canon.threads = 0;
  canon.timing = true;
  const std::string text = to_ini(canon);
  std::uint64_t h = 0x51afd7ed558ccd00ULL;
  for (unsigned char ch : text) h = mix64(h ^ ch);
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace bisep

#include "bisep/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "bisep/rng.hpp"

namespace bisep {

SignalProfile SignalProfile::power_law(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("power-law decay rate must be finite and >= 0");
  }
  return {ProfileKind::PowerLaw, alpha};
}

SignalProfile SignalProfile::parse(const std::string& text) {
  if (text == "flat") return flat();
  if (text == "exponential" || text == "exp") return exponential();
  const std::string prefix = "powerlaw:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string rest = text.substr(prefix.size());
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != rest.size()) {
      throw std::invalid_argument("bad power-law rate in profile '" + text + "'");
    }
    return power_law(alpha);
  }
  throw std::invalid_argument("unknown profile '" + text +
                              "' (expected flat, powerlaw:<alpha>, exponential)");
}

std::string SignalProfile::to_string() const {
  switch (kind) {
    case ProfileKind::Flat:
      return "flat";
    case ProfileKind::Exponential:
      return "exponential";
    case ProfileKind::PowerLaw: {
      std::string s = std::to_string(alpha);
      while (s.size() > 1 && s.back() == '0') s.pop_back();
      if (!s.empty() && s.back() == '.') s.pop_back();
      return "powerlaw:" + s;
    }
  }
  return "flat";
}

namespace {

// Unnormalized squared magnitude of the i-th largest entry, i >= 1.
double profile_weight(const SignalProfile& profile, Index i) {
  switch (profile.kind) {
    case ProfileKind::Flat:
      return 1.0;
    case ProfileKind::PowerLaw:
      return std::pow(static_cast<double>(i), -profile.alpha);
    case ProfileKind::Exponential:
      return std::exp(-static_cast<double>(i));
  }
  return 1.0;
}

std::vector<Index> choose_support(Index k, Index n, const SupportRule& rule) {
  if (rule.seed) {
    Engine eng = make_engine(*rule.seed, 0);
    return random_subset(n, k, eng);
  }
  std::vector<Index> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), Index{0});
  return idx;
}

}  // namespace

SparseSignal generate_signal(const SignalProfile& profile, Index k, Index n,
                             const SupportRule& rule) {
  if (k < 1 || k > n) {
    throw std::invalid_argument("generate_signal: need 1 <= k <= n");
  }
  if (profile.kind == ProfileKind::PowerLaw && !(profile.alpha >= 0.0)) {
    throw std::invalid_argument("generate_signal: alpha must be >= 0");
  }
  std::vector<double> w(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) w[static_cast<std::size_t>(i)] = profile_weight(profile, i + 1);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);

  SparseSignal x;
  x.values = Eigen::VectorXd::Zero(n);
  x.support = choose_support(k, n, rule);
  for (Index i = 0; i < k; ++i) {
    x.values(x.support[static_cast<std::size_t>(i)]) =
        std::sqrt(w[static_cast<std::size_t>(i)] / total);
  }
  return x;
}

double structure_function(const SparseSignal& x, Index p) {
  if (p < 1 || p > x.n()) {
    throw std::invalid_argument("structure_function: need 1 <= p <= n");
  }
  if (p >= x.k()) return 1.0;
  std::vector<double> sq;
  sq.reserve(x.support.size());
  for (Index i : x.support) sq.push_back(x.values(i) * x.values(i));
  std::partial_sort(sq.begin(), sq.begin() + p, sq.end(), std::greater<>());
  return 1.0 / std::accumulate(sq.begin(), sq.begin() + p, 0.0);
}

double structure_function_asymptotic(double alpha, Index k, Index p) {
  if (p < 1 || p > k) {
    throw std::invalid_argument("structure_function_asymptotic: need 1 <= p <= k");
  }
  if (!(alpha >= 0.0)) {
    throw std::invalid_argument("structure_function_asymptotic: alpha must be >= 0");
  }
  double head = 0.0;
  double full = 0.0;
  for (Index i = 1; i <= k; ++i) {
    const double term = std::pow(static_cast<double>(i), -alpha);
    full += term;
    if (i <= p) head += term;
  }
  return full / head;
}

std::vector<double> structure_sequence(const SignalProfile& profile, Index k) {
  if (k < 1) throw std::invalid_argument("structure_sequence: need k >= 1");
  std::vector<double> w(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) w[static_cast<std::size_t>(i)] = profile_weight(profile, i + 1);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<double> s(static_cast<std::size_t>(k));
  double head = 0.0;
  for (Index t = 0; t < k; ++t) {
    head += w[static_cast<std::size_t>(t)];
    s[static_cast<std::size_t>(t)] = (t + 1 == k) ? 1.0 : total / head;
  }
  return s;
}

ComplexityPeak complexity_term(std::span<const double> su,
                               std::span<const double> sv, Index k_u,
                               Index k_v, Index n) {
  if (su.empty() || sv.empty()) {
    throw std::invalid_argument("complexity_term: empty structure sequence");
  }
  if (k_u < 1 || k_v < 1 || static_cast<Index>(su.size()) < k_u ||
      static_cast<Index>(sv.size()) < k_v) {
    throw std::invalid_argument("complexity_term: sequences must cover 1..k");
  }
  if (n < 2) throw std::invalid_argument("complexity_term: need n >= 2");
  const double log_n = std::log(static_cast<double>(n));
  ComplexityPeak best;
  best.value = -1.0;
  const Index k_max = std::max(k_u, k_v);
  for (Index t = 1; t <= k_max; ++t) {
    const Index tu = std::min(t, k_u);
    const Index tv = std::min(t, k_v);
    const double value = static_cast<double>(tu + tv) *
                         su[static_cast<std::size_t>(tu - 1)] *
                         sv[static_cast<std::size_t>(tv - 1)] * log_n;
    if (value > best.value) best = {t, value};
  }
  return best;
}

PhaseExponent phase_exponent(double alpha_u, double alpha_v) {
  if (!(alpha_u >= 0.0) || !(alpha_v >= 0.0)) {
    throw std::invalid_argument("phase_exponent: decay rates must be >= 0");
  }
  PhaseExponent out;
  out.tau = std::max(1.0, 2.0 - (alpha_u + alpha_v));
  out.boundary_log_penalty = (alpha_u == 0.0 && alpha_v == 1.0) ||
                             (alpha_u == 1.0 && alpha_v == 0.0);
  return out;
}

}  // namespace bisep

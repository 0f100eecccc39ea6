#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bisep {

using Index = Eigen::Index;

enum class ProfileKind { Flat, PowerLaw, Exponential };

// Shape of the sorted squared magnitudes of a sparse unit vector.
//   Flat:        1, 1, ..., 1
//   PowerLaw:    i^(-alpha)            (alpha = 0 is Flat)
//   Exponential: exp(-i), i = 1..k
struct SignalProfile {
  ProfileKind kind = ProfileKind::Flat;
  double alpha = 0.0;

  static SignalProfile flat() { return {ProfileKind::Flat, 0.0}; }
  static SignalProfile power_law(double alpha);
  static SignalProfile exponential() { return {ProfileKind::Exponential, 0.0}; }

  // "flat", "powerlaw:<alpha>", "exponential"
  static SignalProfile parse(const std::string& text);
  std::string to_string() const;

  bool operator==(const SignalProfile&) const = default;
};

// Placement of the k nonzeros: the first k coordinates, or a uniformly random
// k-subset drawn from the given seed.
struct SupportRule {
  std::optional<std::uint64_t> seed;

  static SupportRule first_k() { return {}; }
  static SupportRule seeded_random(std::uint64_t s) { return {s}; }
};

struct SparseSignal {
  Eigen::VectorXd values;
  std::vector<Index> support;  // strictly increasing

  Index n() const { return values.size(); }
  Index k() const { return static_cast<Index>(support.size()); }
};

/// Builds a nonnegative unit k-sparse vector whose sorted squared magnitudes
/// follow `profile`. The j-th largest magnitude lands on the j-th smallest
/// support index.
SparseSignal generate_signal(const SignalProfile& profile, Index k, Index n,
                             const SupportRule& rule = SupportRule::first_k());

/// Reciprocal of the energy held by the p largest-magnitude entries.
/// Exactly 1.0 once p reaches the sparsity.
double structure_function(const SparseSignal& x, Index p);

/// H_{k,alpha} / H_{p,alpha} by direct summation of i^(-alpha).
double structure_function_asymptotic(double alpha, Index k, Index p);

/// s(1..k) for a signal following `profile`; entry t-1 holds s(t).
std::vector<double> structure_sequence(const SignalProfile& profile, Index k);

struct ComplexityPeak {
  Index argmax_t = 0;
  double value = 0.0;
};

/// max over 1 <= t <= max(k_u, k_v) of (t_u + t_v) s_u(t_u) s_v(t_v) ln(n),
/// with t_u = min(t, k_u), t_v = min(t, k_v). Ties go to the smallest t.
ComplexityPeak complexity_term(std::span<const double> su,
                               std::span<const double> sv, Index k_u,
                               Index k_v, Index n);

struct PhaseExponent {
  double tau = 0.0;
  bool boundary_log_penalty = false;
};

/// tau = max(1, 2 - (alpha_u + alpha_v)); an extra log k factor applies
/// when {alpha_u, alpha_v} = {0, 1}.
PhaseExponent phase_exponent(double alpha_u, double alpha_v);

}  // namespace bisep

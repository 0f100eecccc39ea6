#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bisep/model.hpp"
#include "bisep/spectral.hpp"

namespace bisep {

struct IterationRecord {
  Index t = 0;
  SupportPair supports;
  double sigma = 0.0;  // restricted singular value (Bi-SEP) or objective (TPower)
  std::optional<double> captured_energy_u;  // ||u_S||_2, only with ground truth
  std::optional<double> captured_energy_v;
  bool degenerate = false;
};

struct EstimateResult {
  Eigen::VectorXd u_hat;  // unit norm, zero off the final support
  Eigen::VectorXd v_hat;
  SupportPair final_supports;
  std::vector<IterationRecord> trace;
  bool converged = true;
  bool degenerate = false;  // some restricted block was identically zero
  Index restarts_used = 0;
  double objective = 0.0;  // u_hat^T Sigma_hat v_hat
};

/// Bilateral stagewise support pursuit.
///
/// Starts from the largest |entry| of Sigma_hat and, for t = 0 .. k_max - 1,
/// takes the leading singular pair of the block on the current supports,
/// forms the proxies r_u = Sigma_hat v_hat and r_v = Sigma_hat^T u_hat from
/// that same pair, and re-selects the top min(t + 1, k) coordinates of each.
/// A final restricted SVD on the last supports gives the estimate.
///
/// `truth` only enriches the trace with captured energies; it never affects
/// a decision.
EstimateResult bi_sep(const EmpiricalCrossCov& emp, Index k_u, Index k_v,
                      const CanonicalModel* truth = nullptr);

struct TPowerOptions {
  Index num_restarts = 20;
  Index max_iters = 200;
  double tolerance = 1e-10;  // absolute objective improvement
  std::uint64_t seed = 0;
};

/// Alternating hard-thresholded power iteration from random starts.
/// Keeps the restart with the largest empirical objective (lowest restart
/// index on ties); its alternations form the trace.
EstimateResult tpower_scca(const EmpiricalCrossCov& emp, Index k_u, Index k_v,
                           const TPowerOptions& opts);

/// Keeps the k largest-magnitude entries, zeroing the rest.
Eigen::VectorXd hard_threshold(const Eigen::Ref<const Eigen::VectorXd>& x, Index k);

struct EstimationError {
  double err_u = 0.0;
  double err_v = 0.0;
  double err_max = 0.0;
};

EstimationError estimation_error(const EstimateResult& result, const CanonicalModel& truth);

}  // namespace bisep

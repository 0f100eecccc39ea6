#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bisep/profiles.hpp"

namespace bisep {

struct SupportPair {
  std::vector<Index> s_u;  // rows, strictly increasing
  std::vector<Index> s_v;  // columns, strictly increasing

  bool operator==(const SupportPair&) const = default;
};

// Leading singular triplet of a block. `left` and `right` live on the block
// coordinates. The largest-magnitude entry of `left` is nonnegative (lowest
// index on ties).
struct SingularTriplet {
  double sigma = 0.0;
  Eigen::VectorXd left;
  Eigen::VectorXd right;
  bool degenerate = false;  // all-zero block; vectors are e_0
  bool converged = true;
  int iterations = 0;
};

struct PowerIterationOptions {
  double tolerance = 1e-12;  // on the sin-angle between successive iterates
  int max_iterations = 10000;
};

/// Two-sided power iteration on a dense block, starting from the column of
/// the block's largest-magnitude entry. If the iteration stalls it restarts
/// once from a random unit vector seeded by the block contents.
SingularTriplet leading_triplet(const Eigen::Ref<const Eigen::MatrixXd>& block,
                                const PowerIterationOptions& opts = {});

/// Leading triplet of matrix(S_u, S_v).
SingularTriplet restricted_svd(const Eigen::MatrixXd& matrix,
                               const SupportPair& supports,
                               const PowerIterationOptions& opts = {});

Eigen::MatrixXd extract_block(const Eigen::MatrixXd& matrix,
                              const SupportPair& supports);

/// Scatters block coordinates back into an ambient zero vector.
Eigen::VectorXd pad_to_ambient(const Eigen::VectorXd& local,
                               const std::vector<Index>& support, Index n);

double spectral_norm(const Eigen::Ref<const Eigen::MatrixXd>& block);

/// Indices of the k largest |x_i|, lowest index first on ties, returned sorted.
std::vector<Index> top_k_indices(const Eigen::Ref<const Eigen::VectorXd>& x, Index k);

/// sqrt(1 - <a,b>^2) of the normalized inputs, in [0, 1].
double sin_angle(const Eigen::Ref<const Eigen::VectorXd>& a,
                 const Eigen::Ref<const Eigen::VectorXd>& b);

/// (row, col) of the largest |entry|; row-major first occurrence on ties.
std::pair<Index, Index> argmax_abs_entry(const Eigen::Ref<const Eigen::MatrixXd>& matrix);

/// Rank-1 Wedin/Weyl bound on the singular-vector sin-angle:
/// 2e/s if e <= s/2, e/(s - e) if e < s, +inf otherwise.
double wedin_rank1_bound(double sigma1, double noise_norm);

}  // namespace bisep

#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "bisep/profiles.hpp"

namespace bisep {

// Whitened spiked model: Sigma_xx = I, Sigma_yy = I, Sigma_xy = rho u v^T.
class CanonicalModel {
 public:
  CanonicalModel(SparseSignal u, SparseSignal v, double rho);

  const SparseSignal& u() const { return u_; }
  const SparseSignal& v() const { return v_; }
  double rho() const { return rho_; }
  Index n1() const { return u_.n(); }
  Index n2() const { return v_.n(); }

  Eigen::MatrixXd population_cross_cov() const;

 private:
  SparseSignal u_;
  SparseSignal v_;
  double rho_;
};

struct EmpiricalCrossCov {
  Eigen::MatrixXd matrix;  // n1 x n2
  Index m = 0;
  std::uint64_t seed = 0;
};

struct NoiseMatrix {
  Eigen::MatrixXd matrix;
};

/// (1/m) sum_i x_i y_i^T over m exact draws of the joint Gaussian law.
///
/// Each draw uses a shared latent pair (z1, z2) with corr(z1, z2) = rho:
///   x = u z1 + (I - u u^T) e1,   y = v z2 + (I - v v^T) e2,
/// with e1, e2 standard normal. Draw i consumes its own RNG stream keyed by
/// (seed, i), and outer products are accumulated in fixed-size blocks in
/// sample order, so the result depends only on (model, m, seed).
EmpiricalCrossCov sample_empirical_cov(const CanonicalModel& model, Index m,
                                       std::uint64_t seed);

/// Wraps an arbitrary matrix (used for noiseless and hand-built inputs).
EmpiricalCrossCov make_empirical(Eigen::MatrixXd matrix, Index m = 1,
                                 std::uint64_t seed = 0);

/// W = Sigma_hat - rho u v^T.
NoiseMatrix noise_matrix(const EmpiricalCrossCov& emp, const CanonicalModel& model);

/// Largest observed ratio ||W_{S1,S2}||_2 / sqrt((|S1| + |S2|) ln(n) / m)
/// over `num_random_supports` random support pairs with 1 <= |S1| <= k_u
/// and 1 <= |S2| <= k_v. A lower estimate of the constant in the uniform
/// sparse-block noise bound.
double check_noise_event(const NoiseMatrix& noise, Index k_u, Index k_v, Index n,
                         Index m, Index num_random_supports, std::uint64_t seed);

}  // namespace bisep

#include "bisep/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bisep/rng.hpp"

namespace bisep {

namespace {

// Sine of the angle between two unit vectors, via the orthogonal residual.
// Accurate down to round-off for nearly parallel inputs, unlike 1 - c^2.
double unit_sin(const Eigen::Ref<const Eigen::VectorXd>& a,
                const Eigen::Ref<const Eigen::VectorXd>& b) {
  const double c = a.dot(b);
  const double s = (b - c * a).norm();
  return std::clamp(s, 0.0, 1.0);
}

std::uint64_t block_fingerprint(const Eigen::Ref<const Eigen::MatrixXd>& block) {
  std::uint64_t h = hash_words({static_cast<std::uint64_t>(block.rows()),
                                static_cast<std::uint64_t>(block.cols())});
  for (Index j = 0; j < block.cols(); ++j)
    for (Index i = 0; i < block.rows(); ++i) h = mix64(h ^ double_bits(block(i, j)));
  return h;
}

struct IterateState {
  Eigen::VectorXd left;
  Eigen::VectorXd right;
  bool converged = false;
  int iterations = 0;
};

IterateState iterate(const Eigen::Ref<const Eigen::MatrixXd>& a, Eigen::VectorXd right,
                     const PowerIterationOptions& opts) {
  IterateState st;
  st.left = Eigen::VectorXd::Zero(a.rows());
  for (int it = 0; it < opts.max_iterations; ++it) {
    st.iterations = it + 1;
    Eigen::VectorXd left = a * right;
    const double ln = left.norm();
    if (!(ln > 0.0)) break;  // start vector in the null space
    left /= ln;
    Eigen::VectorXd next = a.transpose() * left;
    const double rn = next.norm();
    if (!(rn > 0.0)) break;
    next /= rn;
    const double change = unit_sin(right, next);
    right = std::move(next);
    st.left = std::move(left);
    if (change < opts.tolerance) {
      st.converged = true;
      break;
    }
  }
  st.right = std::move(right);
  return st;
}

}  // namespace

SingularTriplet leading_triplet(const Eigen::Ref<const Eigen::MatrixXd>& block,
                                const PowerIterationOptions& opts) {
  if (block.rows() == 0 || block.cols() == 0) {
    throw std::invalid_argument("leading_triplet: empty block");
  }
  SingularTriplet out;
  const auto [r0, c0] = argmax_abs_entry(block);
  if (block(r0, c0) == 0.0) {
    out.degenerate = true;
    out.left = Eigen::VectorXd::Unit(block.rows(), 0);
    out.right = Eigen::VectorXd::Unit(block.cols(), 0);
    return out;
  }

  IterateState st = iterate(block, Eigen::VectorXd::Unit(block.cols(), c0), opts);
  if (!st.converged) {
    Engine eng = make_engine(block_fingerprint(block), 1);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd start(block.cols());
    for (Index j = 0; j < start.size(); ++j) start(j) = gauss(eng);
    start.normalize();
    IterateState retry = iterate(block, std::move(start), opts);
    if (retry.converged || retry.left.norm() > 0.0) {
      retry.iterations += st.iterations;
      st = std::move(retry);
    }
  }

  // Final consistent pair: left = A right / ||A right||, sigma = ||A right||.
  Eigen::VectorXd left = block * st.right;
  out.sigma = left.norm();
  if (!(out.sigma > 0.0)) {
    out.degenerate = true;
    out.left = Eigen::VectorXd::Unit(block.rows(), 0);
    out.right = Eigen::VectorXd::Unit(block.cols(), 0);
    out.converged = false;
    out.iterations = st.iterations;
    return out;
  }
  left /= out.sigma;
  out.right = std::move(st.right);

  Index pivot = 0;
  for (Index i = 1; i < left.size(); ++i)
    if (std::abs(left(i)) > std::abs(left(pivot))) pivot = i;
  if (left(pivot) < 0.0) {
    left = -left;
    out.right = -out.right;
  }
  out.left = std::move(left);
  out.converged = st.converged;
  out.iterations = st.iterations;
  return out;
}

namespace {

bool strictly_increasing(const std::vector<Index>& s) {
  return std::adjacent_find(s.begin(), s.end(), [](Index a, Index b) { return a >= b; }) == s.end();
}

}  // namespace

Eigen::MatrixXd extract_block(const Eigen::MatrixXd& matrix, const SupportPair& supports) {
  if (supports.s_u.empty() || supports.s_v.empty()) {
    throw std::invalid_argument("extract_block: empty support");
  }
  if (!strictly_increasing(supports.s_u) || !strictly_increasing(supports.s_v)) {
    throw std::invalid_argument("extract_block: supports must be strictly increasing");
  }
  Eigen::MatrixXd block(static_cast<Index>(supports.s_u.size()),
                        static_cast<Index>(supports.s_v.size()));
  for (Index j = 0; j < block.cols(); ++j) {
    const Index c = supports.s_v[static_cast<std::size_t>(j)];
    if (c < 0 || c >= matrix.cols()) throw std::invalid_argument("extract_block: column out of range");
    for (Index i = 0; i < block.rows(); ++i) {
      const Index r = supports.s_u[static_cast<std::size_t>(i)];
      if (r < 0 || r >= matrix.rows()) throw std::invalid_argument("extract_block: row out of range");
      block(i, j) = matrix(r, c);
    }
  }
  return block;
}

SingularTriplet restricted_svd(const Eigen::MatrixXd& matrix, const SupportPair& supports,
                               const PowerIterationOptions& opts) {
  return leading_triplet(extract_block(matrix, supports), opts);
}

Eigen::VectorXd pad_to_ambient(const Eigen::VectorXd& local, const std::vector<Index>& support,
                               Index n) {
  if (static_cast<Index>(support.size()) != local.size()) {
    throw std::invalid_argument("pad_to_ambient: size mismatch");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < support.size(); ++i) out(support[i]) = local(static_cast<Index>(i));
  return out;
}

double spectral_norm(const Eigen::Ref<const Eigen::MatrixXd>& block) {
  if (block.rows() == 0 || block.cols() == 0) {
    throw std::invalid_argument("spectral_norm: empty matrix");
  }
  return leading_triplet(block).sigma;
}

std::vector<Index> top_k_indices(const Eigen::Ref<const Eigen::VectorXd>& x, Index k) {
  if (k < 1 || k > x.size()) {
    throw std::invalid_argument("top_k_indices: need 1 <= k <= length");
  }
  std::vector<Index> idx(static_cast<std::size_t>(x.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  auto before = [&x](Index a, Index b) {
    const double fa = std::abs(x(a));
    const double fb = std::abs(x(b));
    return fa > fb || (fa == fb && a < b);
  };
  std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(), before);
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

double sin_angle(const Eigen::Ref<const Eigen::VectorXd>& a,
                 const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sin_angle: length mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw std::invalid_argument("sin_angle: zero vector");
  return unit_sin(a / na, b / nb);
}

std::pair<Index, Index> argmax_abs_entry(const Eigen::Ref<const Eigen::MatrixXd>& matrix) {
  if (matrix.rows() == 0 || matrix.cols() == 0) {
    throw std::invalid_argument("argmax_abs_entry: empty matrix");
  }
  Index best_r = 0;
  Index best_c = 0;
  double best = -1.0;
  // Column-major scan; row-major tie-break is enforced by the comparison.
  for (Index c = 0; c < matrix.cols(); ++c) {
    for (Index r = 0; r < matrix.rows(); ++r) {
      const double a = std::abs(matrix(r, c));
      if (a > best || (a == best && r < best_r)) {
        best = a;
        best_r = r;
        best_c = c;
      }
    }
  }
  return {best_r, best_c};
}

double wedin_rank1_bound(double sigma1, double noise_norm) {
  if (!(sigma1 > 0.0)) throw std::invalid_argument("wedin_rank1_bound: sigma1 must be > 0");
  if (!(noise_norm >= 0.0)) throw std::invalid_argument("wedin_rank1_bound: noise norm must be >= 0");
  if (noise_norm <= 0.5 * sigma1) return 2.0 * noise_norm / sigma1;
  if (noise_norm < sigma1) return noise_norm / (sigma1 - noise_norm);
  return std::numeric_limits<double>::infinity();
}

}  // namespace bisep

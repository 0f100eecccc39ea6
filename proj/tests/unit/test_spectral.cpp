#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "bisep/rng.hpp"
#include "bisep/spectral.hpp"

using namespace bisep;

namespace {

Eigen::MatrixXd gaussian(Index r, Index c, std::uint64_t seed) {
  Engine eng = make_engine(seed, 0);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) a(i, j) = g(eng);
  return a;
}

// Oracle: leading eigenpair of A^T A gives sigma^2 and the right vector.
struct DenseOracle {
  double sigma;
  Eigen::VectorXd left, right;
};

DenseOracle dense_oracle(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.transpose() * a);
  const Index last = a.cols() - 1;
  DenseOracle o;
  o.sigma = std::sqrt(std::max(0.0, es.eigenvalues()(last)));
  o.right = es.eigenvectors().col(last);
  o.left = (a * o.right).normalized();
  return o;
}

std::vector<Index> iota_vec(Index n) {
  std::vector<Index> v(n);
  std::iota(v.begin(), v.end(), Index{0});
  return v;
}

}  // namespace

TEST_CASE("restricted_svd: 1x1 block") {
  Eigen::MatrixXd a(3, 3);
  a << 1, 2, 3, 4, -5, 6, 7, 8, 9;
  const SingularTriplet t = restricted_svd(a, {{1}, {1}});
  CHECK(t.sigma == 5.0);
  CHECK(t.left.size() == 1);
  CHECK(t.left(0) == 1.0);
  CHECK(t.right(0) == -1.0);
  CHECK_FALSE(t.degenerate);
}

TEST_CASE("restricted_svd: exact rank-1 block") {
  Eigen::VectorXd a(4), b(3);
  a << 1, -2, 0.5, 3;
  b << -1, 1, 2;
  a.normalize();
  b.normalize();
  const Eigen::MatrixXd m = 2.5 * a * b.transpose();
  const SingularTriplet t = leading_triplet(m);
  CHECK(t.sigma == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(sin_angle(t.left, a) <= 1e-9);
  CHECK(sin_angle(t.right, b) <= 1e-9);
  // sign convention: largest |left| entry (index 3) nonnegative
  CHECK(t.left(3) > 0);
}

TEST_CASE("restricted_svd: dense oracle on seeded 4x3 and 10x7") {
  for (auto [r, c] : {std::pair<Index, Index>{4, 3}, {10, 7}, {3, 8}}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Eigen::MatrixXd a = gaussian(r, c, seed + 100 * r);
      const DenseOracle o = dense_oracle(a);
      const SingularTriplet t = leading_triplet(a);
      CHECK(std::abs(t.sigma - o.sigma) <= 1e-8 * o.sigma);
      CHECK(sin_angle(t.left, o.left) <= 1e-8);
      CHECK(sin_angle(t.right, o.right) <= 1e-8);
      CHECK((a * t.right - t.sigma * t.left).norm() <= 1e-9 * std::max(1.0, t.sigma));
      CHECK(std::abs(t.left.norm() - 1.0) <= 1e-10);
      CHECK(std::abs(t.right.norm() - 1.0) <= 1e-10);
      CHECK(spectral_norm(a) == doctest::Approx(o.sigma).epsilon(1e-9));
    }
  }
}

TEST_CASE("restricted_svd: sub-block extraction") {
  const Eigen::MatrixXd a = gaussian(9, 11, 5);
  const SupportPair s{{1, 4, 8}, {0, 2, 3, 10}};
  const Eigen::MatrixXd blk = extract_block(a, s);
  CHECK(blk.rows() == 3);
  CHECK(blk.cols() == 4);
  CHECK(blk(2, 3) == a(8, 10));
  const SingularTriplet t = restricted_svd(a, s);
  CHECK(t.sigma == doctest::Approx(dense_oracle(blk).sigma).epsilon(1e-10));
  const Eigen::VectorXd padded = pad_to_ambient(t.left, s.s_u, 9);
  CHECK(padded.size() == 9);
  CHECK(padded(4) == t.left(1));
  CHECK(padded(0) == 0.0);
  CHECK_THROWS_AS(restricted_svd(a, {{}, {0}}), std::invalid_argument);
  CHECK_THROWS_AS(restricted_svd(a, {{9}, {0}}), std::invalid_argument);
  CHECK_THROWS_AS(restricted_svd(a, {{2, 1}, {0}}), std::invalid_argument);
}

TEST_CASE("restricted_svd: all-zero block is degenerate") {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(4, 4);
  const SingularTriplet t = restricted_svd(z, {{0, 2}, {1, 3}});
  CHECK(t.degenerate);
  CHECK(t.sigma == 0.0);
  CHECK(t.left(0) == 1.0);
  CHECK(t.left(1) == 0.0);
  CHECK(t.right(0) == 1.0);
}

TEST_CASE("restricted_svd: permutation invariance") {
  const Eigen::MatrixXd a = gaussian(6, 5, 31);
  const SingularTriplet t = leading_triplet(a);
  const std::vector<Index> pr = {3, 0, 5, 1, 4, 2};
  const std::vector<Index> pc = {4, 2, 0, 3, 1};
  Eigen::MatrixXd b(6, 5);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 5; ++j) b(i, j) = a(pr[i], pc[j]);
  const SingularTriplet tb = leading_triplet(b);
  CHECK(tb.sigma == doctest::Approx(t.sigma).epsilon(1e-12));
  for (Index i = 0; i < 6; ++i) CHECK(tb.left(i) == doctest::Approx(t.left(pr[i])).epsilon(1e-9));
  for (Index j = 0; j < 5; ++j) CHECK(tb.right(j) == doctest::Approx(t.right(pc[j])).epsilon(1e-9));
}

TEST_CASE("spectral_norm examples") {
  CHECK(spectral_norm(Eigen::MatrixXd::Zero(3, 3)) == 0.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 1;
  CHECK(spectral_norm(d) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(spectral_norm(Eigen::MatrixXd(0, 3)), std::invalid_argument);
}

TEST_CASE("spectral_norm: submatrix monotonicity") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Eigen::MatrixXd a = gaussian(12, 9, 900 + seed);
    Engine eng = make_engine(seed, 3);
    std::uniform_int_distribution<Index> ru(1, 12), rv(1, 9);
    const SupportPair s{random_subset(12, ru(eng), eng), random_subset(9, rv(eng), eng)};
    CHECK(spectral_norm(extract_block(a, s)) <= spectral_norm(a) * (1 + 1e-12));
  }
}

TEST_CASE("top_k_indices examples") {
  Eigen::VectorXd x(3);
  x << 0.1, -0.9, 0.5;
  CHECK(top_k_indices(x, 2) == std::vector<Index>{1, 2});
  x << 0.5, 0.5, 0.5;
  CHECK(top_k_indices(x, 2) == std::vector<Index>{0, 1});
  Eigen::VectorXd y(4);
  y << 0, 0, 0, 7;
  CHECK(top_k_indices(y, 1) == std::vector<Index>{3});
  CHECK(top_k_indices(y, 4) == iota_vec(4));
  CHECK_THROWS_AS(top_k_indices(y, 0), std::invalid_argument);
  CHECK_THROWS_AS(top_k_indices(y, 5), std::invalid_argument);
}

TEST_CASE("top_k_indices: energy links to the structure function") {
  for (const SignalProfile& p : {SignalProfile::power_law(1.3), SignalProfile::exponential()}) {
    const SparseSignal s = generate_signal(p, 12, 40, SupportRule::seeded_random(4));
    for (Index k = 1; k <= 12; ++k) {
      double energy = 0;
      for (Index i : top_k_indices(s.values, k)) energy += s.values(i) * s.values(i);
      CHECK(energy == doctest::Approx(1.0 / structure_function(s, k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sin_angle examples") {
  Eigen::VectorXd e1 = Eigen::VectorXd::Unit(3, 0);
  Eigen::VectorXd e2 = Eigen::VectorXd::Unit(3, 1);
  CHECK(sin_angle(e1, e1) == 0.0);
  CHECK(sin_angle(e1, -e1) == 0.0);
  CHECK(sin_angle(e1, e2) == 1.0);
  CHECK(sin_angle(e1, (e1 + e2) / std::sqrt(2.0)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  // resolves tiny angles well below the sqrt(eps) floor of 1 - c^2
  Eigen::VectorXd tilt = e1;
  tilt(1) = 1e-11;
  CHECK(sin_angle(e1, tilt) == doctest::Approx(1e-11).epsilon(1e-6));
  CHECK_THROWS_AS(sin_angle(e1, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("argmax_abs_entry examples") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(4, 7, 0.5);
  CHECK(argmax_abs_entry(a) == std::pair<Index, Index>{0, 0});
  a(2, 5) = -3;
  CHECK(argmax_abs_entry(a) == std::pair<Index, Index>{2, 5});
  // ties resolved row-major: (1, 6) precedes (3, 0)
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4, 7);
  b(3, 0) = 2;
  b(1, 6) = -2;
  CHECK(argmax_abs_entry(b) == std::pair<Index, Index>{1, 6});

  const SparseSignal u = generate_signal(SignalProfile::power_law(1), 4, 10, SupportRule::seeded_random(1));
  const SparseSignal v = generate_signal(SignalProfile::exponential(), 3, 8, SupportRule::seeded_random(2));
  const Eigen::MatrixXd r1 = 0.7 * u.values * v.values.transpose();
  CHECK(argmax_abs_entry(r1) == std::pair<Index, Index>{u.support[0], v.support[0]});
}

TEST_CASE("wedin_rank1_bound examples") {
  CHECK(wedin_rank1_bound(1, 0) == 0.0);
  CHECK(wedin_rank1_bound(1, 0.5) == 1.0);
  CHECK(wedin_rank1_bound(1, 0.25) == 0.5);
  CHECK(wedin_rank1_bound(1, 0.75) == doctest::Approx(3.0));
  CHECK(std::isinf(wedin_rank1_bound(1, 1.0)));
  CHECK_THROWS_AS(wedin_rank1_bound(0, 0.1), std::invalid_argument);
}

TEST_CASE("Wedin dominance on rank-1 plus noise") {
  int violations = 0;
  for (std::uint64_t inst = 0; inst < 1000; ++inst) {
    Engine eng = make_engine(4242, inst);
    std::uniform_int_distribution<Index> dim(2, 20);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Index n1 = dim(eng), n2 = dim(eng);
    const Eigen::VectorXd a = gaussian(n1, 1, eng()).col(0).normalized();
    const Eigen::VectorXd b = gaussian(n2, 1, eng()).col(0).normalized();
    Eigen::MatrixXd e = gaussian(n1, n2, eng());
    const double sigma = 1.0 + unif(eng);
    e *= 0.95 * sigma * unif(eng) / dense_oracle(e).sigma;
    const double en = dense_oracle(e).sigma;
    const SingularTriplet t = leading_triplet(sigma * a * b.transpose() + e);
    if (sin_angle(t.left, a) > wedin_rank1_bound(sigma, en) + 1e-8) ++violations;
  }
  CHECK(violations == 0);
}

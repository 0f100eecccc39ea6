#include "bisep/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "bisep/rng.hpp"
#include "bisep/spectral.hpp"

namespace bisep {

namespace {

constexpr Index kSampleBlock = 256;

void check_signal(const SparseSignal& s, const char* name) {
  if (s.n() < 1 || s.k() < 1 || s.k() > s.n()) {
    throw std::invalid_argument(std::string("CanonicalModel: invalid signal ") + name);
  }
  if (std::abs(s.values.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument(std::string("CanonicalModel: signal ") + name +
                                " must have unit norm");
  }
}

// Fills `row` with u z + (I - u u^T) e for a fresh standard normal e.
void draw_view(const SparseSignal& s, double z, Engine& eng,
               std::normal_distribution<double>& gauss,
               Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) {
  for (Index j = 0; j < row.size(); ++j) row(j) = gauss(eng);
  double proj = 0.0;
  for (Index i : s.support) proj += s.values(i) * row(i);
  for (Index i : s.support) row(i) += (z - proj) * s.values(i);
}

}  // namespace

CanonicalModel::CanonicalModel(SparseSignal u, SparseSignal v, double rho)
    : u_(std::move(u)), v_(std::move(v)), rho_(rho) {
  if (!(rho_ > 0.0 && rho_ < 1.0)) {
    throw std::invalid_argument("CanonicalModel: rho must lie in (0, 1)");
  }
  check_signal(u_, "u");
  check_signal(v_, "v");
}

Eigen::MatrixXd CanonicalModel::population_cross_cov() const {
  return rho_ * u_.values * v_.values.transpose();
}

EmpiricalCrossCov sample_empirical_cov(const CanonicalModel& model, Index m,
                                       std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("sample_empirical_cov: need m >= 1");
  const Index n1 = model.n1();
  const Index n2 = model.n2();
  const double rho = model.rho();
  const double rho_c = std::sqrt(1.0 - rho * rho);

  EmpiricalCrossCov out;
  out.m = m;
  out.seed = seed;
  out.matrix = Eigen::MatrixXd::Zero(n1, n2);

  Eigen::MatrixXd xb(std::min(kSampleBlock, m), n1);
  Eigen::MatrixXd yb(std::min(kSampleBlock, m), n2);
  std::normal_distribution<double> gauss;
  for (Index start = 0; start < m; start += kSampleBlock) {
    const Index rows = std::min(kSampleBlock, m - start);
    for (Index r = 0; r < rows; ++r) {
      Engine eng = make_engine(seed, static_cast<std::uint64_t>(start + r));
      gauss.reset();
      const double z1 = gauss(eng);
      const double z2 = rho * z1 + rho_c * gauss(eng);
      draw_view(model.u(), z1, eng, gauss, xb.row(r));
      draw_view(model.v(), z2, eng, gauss, yb.row(r));
    }
    out.matrix.noalias() += xb.topRows(rows).transpose() * yb.topRows(rows);
  }
  out.matrix /= static_cast<double>(m);
  return out;
}

EmpiricalCrossCov make_empirical(Eigen::MatrixXd matrix, Index m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("make_empirical: need m >= 1");
  return {std::move(matrix), m, seed};
}

NoiseMatrix noise_matrix(const EmpiricalCrossCov& emp, const CanonicalModel& model) {
  if (emp.matrix.rows() != model.n1() || emp.matrix.cols() != model.n2()) {
    throw std::invalid_argument("noise_matrix: dimension mismatch");
  }
  return {emp.matrix - model.population_cross_cov()};
}

double check_noise_event(const NoiseMatrix& noise, Index k_u, Index k_v, Index n,
                         Index m, Index num_random_supports, std::uint64_t seed) {
  const Eigen::MatrixXd& w = noise.matrix;
  if (w.rows() == 0 || w.cols() == 0) {
    throw std::invalid_argument("check_noise_event: empty noise matrix");
  }
  if (num_random_supports < 1) {
    throw std::invalid_argument("check_noise_event: need at least one support");
  }
  if (k_u < 1 || k_u > w.rows() || k_v < 1 || k_v > w.cols()) {
    throw std::invalid_argument("check_noise_event: sparsity out of range");
  }
  if (n < 2 || m < 1) throw std::invalid_argument("check_noise_event: need n >= 2, m >= 1");
  const double log_n = std::log(static_cast<double>(n));

  double worst = 0.0;
  for (Index s = 0; s < num_random_supports; ++s) {
    Engine eng = make_engine(seed, static_cast<std::uint64_t>(s));
    std::uniform_int_distribution<Index> size_u(1, k_u);
    std::uniform_int_distribution<Index> size_v(1, k_v);
    const Index a = size_u(eng);
    const Index b = size_v(eng);
    SupportPair sp{random_subset(w.rows(), a, eng), random_subset(w.cols(), b, eng)};
    const double norm = spectral_norm(extract_block(w, sp));
    const double scale = std::sqrt(static_cast<double>(a + b) * log_n / static_cast<double>(m));
    worst = std::max(worst, norm / scale);
  }
  return worst;
}

}  // namespace bisep

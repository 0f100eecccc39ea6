#include "bisep/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "bisep/estimators.hpp"
#include "bisep/model.hpp"
#include "bisep/profiles.hpp"
#include "bisep/rng.hpp"
#include "bisep/spectral.hpp"

namespace bisep {

namespace {

Eigen::VectorXd random_unit(Index n, Engine& eng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd x(n);
  for (Index i = 0; i < n; ++i) x(i) = g(eng);
  return x.normalized();
}

CheckResult check_structure_oracle() {
  double worst = 0.0;
  for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
    for (Index k : {5, 50, 500}) {
      const SparseSignal x = generate_signal(SignalProfile::power_law(alpha), k, k + 7);
      for (Index p = 1; p <= k; ++p) {
        worst = std::max(worst, std::abs(structure_function(x, p) -
                                         structure_function_asymptotic(alpha, k, p)));
      }
    }
  }
  std::ostringstream d;
  d << "max |s(p) - H_k/H_p| = " << worst;
  return {"structure-function oracle", worst <= 1e-10, d.str()};
}

CheckResult check_dense_svd(std::uint64_t seed) {
  double worst_sigma = 0.0;
  double worst_angle = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    Engine eng = make_engine(seed, 100 + inst);
    std::uniform_int_distribution<Index> dim(1, 12);
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(dim(eng), dim(eng));
    for (Index j = 0; j < a.cols(); ++j)
      for (Index i = 0; i < a.rows(); ++i) a(i, j) = g(eng);
    const SingularTriplet t = leading_triplet(a);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double s0 = svd.singularValues()(0);
    const double s1 = svd.singularValues().size() > 1 ? svd.singularValues()(1) : 0.0;
    if (s0 - s1 < 1e-3 * s0) continue;  // skip nearly gap-free draws
    worst_sigma = std::max(worst_sigma, std::abs(t.sigma - s0) / s0);
    worst_angle = std::max(worst_angle, sin_angle(t.left, svd.matrixU().col(0)));
  }
  std::ostringstream d;
  d << "max rel sigma err = " << worst_sigma << ", max sin-angle = " << worst_angle;
  return {"restricted SVD vs dense SVD", worst_sigma <= 1e-8 && worst_angle <= 1e-6, d.str()};
}

CheckResult check_noiseless(std::uint64_t seed) {
  int bad = 0;
  const SignalProfile profiles[] = {SignalProfile::flat(), SignalProfile::power_law(1.0),
                                    SignalProfile::exponential()};
  for (int inst = 0; inst < 30; ++inst) {
    Engine eng = make_engine(seed, 500 + inst);
    std::uniform_int_distribution<Index> nd(20, 120);
    std::uniform_int_distribution<Index> kd(3, 15);
    const Index n = nd(eng);
    const Index k = kd(eng);
    const SignalProfile& p = profiles[inst % 3];
    const CanonicalModel model(generate_signal(p, k, n, SupportRule::seeded_random(eng())),
                               generate_signal(p, k, n, SupportRule::seeded_random(eng())),
                               0.5);
    const EstimateResult r = bi_sep(make_empirical(model.population_cross_cov()), k, k);
    const EstimationError e = estimation_error(r, model);
    if (r.final_supports.s_u != model.u().support || r.final_supports.s_v != model.v().support ||
        e.err_max > 1e-8)
      ++bad;
  }
  return {"noiseless exact recovery", bad == 0, std::to_string(bad) + " of 30 instances failed"};
}

CheckResult check_wedin(std::uint64_t seed) {
  int violations = 0;
  double worst_slack = -1.0;
  for (int inst = 0; inst < 1000; ++inst) {
    Engine eng = make_engine(seed, 2000 + inst);
    std::uniform_int_distribution<Index> dim(2, 20);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> g;
    const Index n1 = dim(eng);
    const Index n2 = dim(eng);
    const double sigma = 1.0 + 4.0 * unif(eng);
    const Eigen::VectorXd a = random_unit(n1, eng);
    const Eigen::VectorXd b = random_unit(n2, eng);
    Eigen::MatrixXd e(n1, n2);
    for (Index j = 0; j < n2; ++j)
      for (Index i = 0; i < n1; ++i) e(i, j) = g(eng);
    const double target = 0.499 * sigma * unif(eng);
    e *= target / spectral_norm(e);
    const double enorm = spectral_norm(e);
    const SingularTriplet t = leading_triplet(sigma * a * b.transpose() + e);
    const double observed = std::max(sin_angle(t.left, a), sin_angle(t.right, b));
    const double bound = wedin_rank1_bound(sigma, enorm);
    worst_slack = std::max(worst_slack, observed - bound);
    if (observed > bound + 1e-8) ++violations;
  }
  std::ostringstream d;
  d << violations << " violations of 1000, max(observed - bound) = " << worst_slack;
  return {"rank-1 Wedin dominance", violations == 0, d.str()};
}

CheckResult check_noise_stability(std::uint64_t seed) {
  const Index n = 200;
  const Index k = 10;
  const CanonicalModel model(generate_signal(SignalProfile::flat(), k, n,
                                             SupportRule::seeded_random(seed)),
                             generate_signal(SignalProfile::flat(), k, n,
                                             SupportRule::seeded_random(seed + 1)),
                             0.8);
  double c[2];
  const Index ms[2] = {2000, 8000};
  for (int i = 0; i < 2; ++i) {
    const EmpiricalCrossCov emp = sample_empirical_cov(model, ms[i], stream_seed(seed, 40 + i));
    c[i] = check_noise_event(noise_matrix(emp, model), k, k, n, ms[i], 500, stream_seed(seed, 50));
  }
  const double rel = std::abs(c[0] - c[1]) / std::max(c[0], c[1]);
  std::ostringstream d;
  d << "C(m=2000) = " << c[0] << ", C(m=8000) = " << c[1] << ", relative gap = " << rel;
  return {"noise-event constant stability", rel < 0.5, d.str()};
}

}  // namespace

std::vector<CheckResult> run_verification(std::uint64_t seed) {
  return {check_structure_oracle(), check_dense_svd(seed), check_noiseless(seed),
          check_wedin(seed), check_noise_stability(seed)};
}

}  // namespace bisep

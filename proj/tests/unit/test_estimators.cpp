#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bisep/estimators.hpp"
#include "bisep/rng.hpp"

using namespace bisep;

namespace {

CanonicalModel make_model(const SignalProfile& pu, const SignalProfile& pv, Index n, Index ku, Index kv,
                          double rho, std::uint64_t seed) {
  return CanonicalModel(generate_signal(pu, ku, n, SupportRule::seeded_random(seed)),
                        generate_signal(pv, kv, n, SupportRule::seeded_random(seed + 1)), rho);
}

TPowerOptions opts(Index restarts, std::uint64_t seed) {
  TPowerOptions o;
  o.num_restarts = restarts;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("bi_sep: hand-executed 2x2 example") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.1, 0.1, 0.05;
  const EstimateResult r = bi_sep(make_empirical(a), 1, 1);
  CHECK(r.final_supports.s_u == std::vector<Index>{0});
  CHECK(r.final_supports.s_v == std::vector<Index>{0});
  CHECK(r.u_hat(0) == 1.0);
  CHECK(r.u_hat(1) == 0.0);
  CHECK(r.v_hat(0) == 1.0);
  CHECK(r.v_hat(1) == 0.0);
  CHECK(r.trace.size() == 2);
}

TEST_CASE("bi_sep: noiseless exact recovery") {
  const SignalProfile profiles[] = {SignalProfile::power_law(0.5), SignalProfile::power_law(2.0),
                                    SignalProfile::exponential()};
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const SignalProfile& p = profiles[seed % 3];
    const CanonicalModel model = make_model(p, p, 80, 10, 10, 0.6, seed * 3);
    const EstimateResult r = bi_sep(make_empirical(model.population_cross_cov()), 10, 10);
    const EstimationError e = estimation_error(r, model);
    CHECK(e.err_u <= 1e-8);
    CHECK(e.err_v <= 1e-8);
    CHECK(r.final_supports.s_u == model.u().support);
    CHECK(r.final_supports.s_v == model.v().support);
  }
  // flat magnitudes also recover exactly (ties do not matter once all true coordinates are positive)
  const CanonicalModel flat = make_model(SignalProfile::flat(), SignalProfile::flat(), 50, 6, 4, 0.9, 77);
  const EstimateResult r = bi_sep(make_empirical(flat.population_cross_cov()), 6, 4);
  CHECK(estimation_error(r, flat).err_max <= 1e-8);
}

TEST_CASE("bi_sep: saturate-and-hold schedule and output invariants") {
  const CanonicalModel model = make_model(SignalProfile::power_law(1), SignalProfile::flat(), 120, 7, 13, 0.8, 5);
  const EmpiricalCrossCov emp = sample_empirical_cov(model, 400, 3);
  const EstimateResult r = bi_sep(emp, 7, 13, &model);
  REQUIRE(r.trace.size() == 14);
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const IterationRecord& rec = r.trace[i];
    CHECK(rec.t == static_cast<Index>(i));
    const Index t = std::max<Index>(rec.t, 1);
    CHECK(static_cast<Index>(rec.supports.s_u.size()) == std::min<Index>(t, 7));
    CHECK(static_cast<Index>(rec.supports.s_v.size()) == std::min<Index>(t, 13));
    CHECK(rec.captured_energy_u.has_value());
    CHECK(std::is_sorted(rec.supports.s_u.begin(), rec.supports.s_u.end()));
  }
  CHECK(std::abs(r.u_hat.norm() - 1.0) <= 1e-10);
  CHECK(std::abs(r.v_hat.norm() - 1.0) <= 1e-10);
  CHECK((r.u_hat.array() != 0).count() <= 7);
  CHECK((r.v_hat.array() != 0).count() <= 13);
  CHECK(r.final_supports == r.trace.back().supports);

  const EstimateResult again = bi_sep(emp, 7, 13);
  CHECK((again.u_hat.array() == r.u_hat.array()).all());
  CHECK((again.v_hat.array() == r.v_hat.array()).all());
  CHECK_FALSE(again.trace.front().captured_energy_u.has_value());
}

TEST_CASE("bi_sep: scale invariance") {
  const CanonicalModel model = make_model(SignalProfile::exponential(), SignalProfile::power_law(1), 90, 8, 8, 0.7, 9);
  const EmpiricalCrossCov emp = sample_empirical_cov(model, 300, 1);
  const EstimateResult base = bi_sep(emp, 8, 8);
  for (double c : {2.0, 0.25}) {
    const EstimateResult s = bi_sep(make_empirical(c * emp.matrix, emp.m), 8, 8);
    CHECK(s.final_supports == base.final_supports);
    CHECK((s.u_hat.array() == base.u_hat.array()).all());
    CHECK((s.v_hat.array() == base.v_hat.array()).all());
  }
}

TEST_CASE("bi_sep: captured energy non-decreasing on noiseless input") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const CanonicalModel model =
        make_model(SignalProfile::power_law(0.8), SignalProfile::exponential(), 60, 9, 5, 0.5, 40 + seed);
    const EstimateResult r = bi_sep(make_empirical(model.population_cross_cov()), 9, 5, &model);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      CHECK(*r.trace[i].captured_energy_u >= *r.trace[i - 1].captured_energy_u - 1e-15);
      CHECK(*r.trace[i].captured_energy_v >= *r.trace[i - 1].captured_energy_v - 1e-15);
    }
    CHECK(*r.trace.back().captured_energy_u == doctest::Approx(1.0));
  }
}

TEST_CASE("bi_sep: permutation equivariance") {
  const Index n = 40;
  const CanonicalModel model = make_model(SignalProfile::power_law(1.5), SignalProfile::power_law(0.5), n, 6, 6, 0.8, 2);
  const EmpiricalCrossCov emp = sample_empirical_cov(model, 500, 8);
  std::vector<Index> p(n), q(n);
  Engine eng = make_engine(3, 3);
  std::iota(p.begin(), p.end(), Index{0});
  std::iota(q.begin(), q.end(), Index{0});
  std::shuffle(p.begin(), p.end(), eng);
  std::shuffle(q.begin(), q.end(), eng);
  Eigen::MatrixXd b(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) b(i, j) = emp.matrix(p[i], q[j]);
  const EstimateResult r = bi_sep(emp, 6, 6);
  const EstimateResult rp = bi_sep(make_empirical(b, emp.m), 6, 6);
  for (Index i = 0; i < n; ++i) CHECK(rp.u_hat(i) == doctest::Approx(r.u_hat(p[i])).epsilon(1e-9));
  for (Index j = 0; j < n; ++j) CHECK(rp.v_hat(j) == doctest::Approx(r.v_hat(q[j])).epsilon(1e-9));
}

TEST_CASE("bi_sep: degenerate blocks hold the prior support") {
  // A single nonzero entry: every proxy outside row 0 / column 0 is zero,
  // so the selections keep growing from zero ties but stay valid.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(5, 5);
  a(2, 3) = 1.0;
  const EstimateResult r = bi_sep(make_empirical(a), 3, 3);
  CHECK(std::abs(r.u_hat.norm() - 1.0) <= 1e-12);
  CHECK(std::abs(r.u_hat(2)) == doctest::Approx(1.0));
  CHECK(std::abs(r.v_hat(3)) == doctest::Approx(1.0));
}

TEST_CASE("bi_sep: input validation") {
  CHECK_THROWS_AS(bi_sep(make_empirical(Eigen::MatrixXd::Zero(4, 4)), 2, 2), std::invalid_argument);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
  CHECK_THROWS_AS(bi_sep(make_empirical(a), 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(bi_sep(make_empirical(a), 2, 5), std::invalid_argument);
  a(1, 1) = NAN;
  CHECK_THROWS_AS(bi_sep(make_empirical(a), 2, 2), std::invalid_argument);
}

TEST_CASE("hard_threshold") {
  Eigen::VectorXd x(5);
  x << 0.3, -2, 0.1, 1, -0.3;
  Eigen::VectorXd h = hard_threshold(x, 2);
  Eigen::VectorXd want(5);
  want << 0, -2, 0, 1, 0;
  CHECK((h.array() == want.array()).all());
  h = hard_threshold(x, 3);
  CHECK(h(0) == 0.3);
  CHECK(h(4) == 0.0);
}

TEST_CASE("tpower_scca: noiseless input converges in at most two alternations") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const CanonicalModel model = make_model(SignalProfile::flat(), SignalProfile::power_law(1), 70, 8, 8, 0.8, 100 + seed);
    const EmpiricalCrossCov emp = make_empirical(model.population_cross_cov());
    const EstimateResult one = tpower_scca(emp, 8, 8, opts(1, seed));
    // accept any restart that hits the support: with noiselessness,
    // a random start overlapping supp(v) aligns in one step
    const EstimateResult r = tpower_scca(emp, 8, 8, opts(5, seed));
    CHECK(estimation_error(r, model).err_max <= 1e-8);
    CHECK(r.trace.size() <= 3);  // two alignments plus the stopping check
    CHECK(one.restarts_used == 1);
  }
}

TEST_CASE("tpower_scca: objective non-decreasing and best-restart selection") {
  const CanonicalModel model = make_model(SignalProfile::flat(), SignalProfile::flat(), 150, 10, 10, 0.8, 7);
  const EmpiricalCrossCov emp = sample_empirical_cov(model, 300, 2);
  const EstimateResult r = tpower_scca(emp, 10, 10, opts(20, 11));
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].sigma >= r.trace[i - 1].sigma - 1e-12);
  CHECK(r.objective == doctest::Approx(r.u_hat.dot(emp.matrix * r.v_hat)).epsilon(1e-12));
  const EstimateResult single = tpower_scca(emp, 10, 10, opts(1, 11));
  CHECK(r.objective >= single.objective - 1e-12);
  CHECK(r.restarts_used == 20);
  CHECK((r.u_hat.array() != 0).count() <= 10);
  CHECK(std::abs(r.v_hat.norm() - 1.0) <= 1e-10);

  const EstimateResult again = tpower_scca(emp, 10, 10, opts(20, 11));
  CHECK((again.u_hat.array() == r.u_hat.array()).all());
}

TEST_CASE("tpower_scca: validation") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
  CHECK_THROWS_AS(tpower_scca(make_empirical(a), 2, 2, opts(0, 1)), std::invalid_argument);
  TPowerOptions o = opts(2, 1);
  o.max_iters = 0;
  CHECK_THROWS_AS(tpower_scca(make_empirical(a), 2, 2, o), std::invalid_argument);
  CHECK_THROWS_AS(tpower_scca(make_empirical(Eigen::MatrixXd::Zero(3, 3)), 1, 1, opts(2, 1)),
                  std::invalid_argument);
}

TEST_CASE("estimation_error examples") {
  const CanonicalModel model = make_model(SignalProfile::flat(), SignalProfile::flat(), 6, 2, 2, 0.5, 1);
  EstimateResult r;
  r.u_hat = model.u().values;
  r.v_hat = model.v().values;
  EstimationError e = estimation_error(r, model);
  CHECK(e.err_max <= 1e-15);

  // orthogonal unit vector on the complement of supp(u)
  Eigen::VectorXd perp = Eigen::VectorXd::Zero(6);
  for (Index i = 0; i < 6; ++i)
    if (model.u().values(i) == 0.0) {
      perp(i) = 1.0;
      break;
    }
  r.u_hat = perp;
  e = estimation_error(r, model);
  CHECK(e.err_u == 1.0);
  CHECK(e.err_v <= 1e-15);
  CHECK(e.err_max == 1.0);

  r.u_hat = (model.u().values + perp) / std::sqrt(2.0);
  e = estimation_error(r, model);
  CHECK(e.err_u == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(e.err_max == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
}

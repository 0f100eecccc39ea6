#include "bisep/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "bisep/rng.hpp"

namespace bisep {

namespace {

void check_budgets(const EmpiricalCrossCov& emp, Index k_u, Index k_v, const char* who) {
  const Eigen::MatrixXd& a = emp.matrix;
  if (a.rows() == 0 || a.cols() == 0) {
    throw std::invalid_argument(std::string(who) + ": empty cross-covariance");
  }
  if (k_u < 1 || k_u > a.rows() || k_v < 1 || k_v > a.cols()) {
    throw std::invalid_argument(std::string(who) + ": need 1 <= k_u <= n1 and 1 <= k_v <= n2");
  }
  if (!a.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite input");
  if (a.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument(std::string(who) + ": all-zero cross-covariance");
  }
}

// A * x for x supported on `cols`.
Eigen::VectorXd times_sparse(const Eigen::MatrixXd& a, const Eigen::VectorXd& x,
                             const std::vector<Index>& cols) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.rows());
  for (Index j : cols) out.noalias() += x(j) * a.col(j);
  return out;
}

// A^T y for y supported on `rows`.
Eigen::VectorXd transpose_times_sparse(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                       const std::vector<Index>& rows) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.cols());
  for (Index i : rows) out.noalias() += y(i) * a.row(i).transpose();
  return out;
}

double support_energy(const SparseSignal& s, const std::vector<Index>& support) {
  double e = 0.0;
  for (Index i : support) e += s.values(i) * s.values(i);
  return std::sqrt(e);
}

IterationRecord make_record(Index t, const SupportPair& sp, double sigma, bool degenerate,
                            const CanonicalModel* truth) {
  IterationRecord rec;
  rec.t = t;
  rec.supports = sp;
  rec.sigma = sigma;
  rec.degenerate = degenerate;
  if (truth) {
    rec.captured_energy_u = support_energy(truth->u(), sp.s_u);
    rec.captured_energy_v = support_energy(truth->v(), sp.s_v);
  }
  return rec;
}

}  // namespace

EstimateResult bi_sep(const EmpiricalCrossCov& emp, Index k_u, Index k_v,
                      const CanonicalModel* truth) {
  check_budgets(emp, k_u, k_v, "bi_sep");
  const Eigen::MatrixXd& a = emp.matrix;
  if (truth && (truth->n1() != a.rows() || truth->n2() != a.cols())) {
    throw std::invalid_argument("bi_sep: ground truth dimensions do not match");
  }
  const Index n1 = a.rows();
  const Index n2 = a.cols();
  const Index k_max = std::max(k_u, k_v);

  EstimateResult res;
  const auto [i0, j0] = argmax_abs_entry(a);
  SupportPair sp{{i0}, {j0}};

  for (Index t = 0; t < k_max; ++t) {
    const SingularTriplet trip = restricted_svd(a, sp);
    res.trace.push_back(make_record(t, sp, trip.sigma, trip.degenerate, truth));
    res.converged = res.converged && trip.converged;
    res.degenerate = res.degenerate || trip.degenerate;

    const Eigen::VectorXd u_hat = pad_to_ambient(trip.left, sp.s_u, n1);
    const Eigen::VectorXd v_hat = pad_to_ambient(trip.right, sp.s_v, n2);
    // Both proxies come from the same iterate pair.
    const Eigen::VectorXd r_u = times_sparse(a, v_hat, sp.s_v);
    const Eigen::VectorXd r_v = transpose_times_sparse(a, u_hat, sp.s_u);

    SupportPair next;
    const bool hold_u = trip.degenerate && r_u.cwiseAbs().maxCoeff() == 0.0;
    const bool hold_v = trip.degenerate && r_v.cwiseAbs().maxCoeff() == 0.0;
    next.s_u = hold_u ? sp.s_u : top_k_indices(r_u, std::min(t + 1, k_u));
    next.s_v = hold_v ? sp.s_v : top_k_indices(r_v, std::min(t + 1, k_v));
    sp = std::move(next);
  }

  const SingularTriplet fin = restricted_svd(a, sp);
  res.trace.push_back(make_record(k_max, sp, fin.sigma, fin.degenerate, truth));
  res.converged = res.converged && fin.converged;
  res.degenerate = res.degenerate || fin.degenerate;
  res.u_hat = pad_to_ambient(fin.left, sp.s_u, n1);
  res.v_hat = pad_to_ambient(fin.right, sp.s_v, n2);
  res.objective = fin.sigma;
  res.final_supports = std::move(sp);
  return res;
}

Eigen::VectorXd hard_threshold(const Eigen::Ref<const Eigen::VectorXd>& x, Index k) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (Index i : top_k_indices(x, k)) out(i) = x(i);
  return out;
}

namespace {

struct RestartOutcome {
  bool ok = false;
  bool converged = false;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  SupportPair supports;
  double objective = -std::numeric_limits<double>::infinity();
  std::vector<IterationRecord> trace;
};

// Thresholds to k entries and normalizes in place; false if nothing survives.
bool threshold_unit(Eigen::VectorXd& x, Index k, std::vector<Index>& support) {
  support = top_k_indices(x, k);
  Eigen::VectorXd kept = Eigen::VectorXd::Zero(x.size());
  for (Index i : support) kept(i) = x(i);
  const double nrm = kept.norm();
  if (!(nrm > 0.0)) return false;
  x = kept / nrm;
  return true;
}

RestartOutcome run_restart(const Eigen::MatrixXd& a, Index k_u, Index k_v,
                           const TPowerOptions& opts, Engine& eng) {
  RestartOutcome out;
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(a.cols());
  for (Index j = 0; j < v.size(); ++j) v(j) = gauss(eng);
  std::vector<Index> sv;
  std::vector<Index> su;
  if (!threshold_unit(v, k_v, sv)) return out;

  Eigen::VectorXd u;
  double prev = -std::numeric_limits<double>::infinity();
  for (Index it = 0; it < opts.max_iters; ++it) {
    u = times_sparse(a, v, sv);
    if (!threshold_unit(u, k_u, su)) return out;
    v = transpose_times_sparse(a, u, su);
    if (!threshold_unit(v, k_v, sv)) return out;
    const double obj = u.dot(times_sparse(a, v, sv));
    out.trace.push_back({it + 1, SupportPair{su, sv}, obj, std::nullopt, std::nullopt, false});
    const bool done = obj - prev < opts.tolerance;
    prev = obj;
    if (done) {
      out.converged = true;
      break;
    }
  }
  out.ok = true;
  out.u = std::move(u);
  out.v = std::move(v);
  out.supports = SupportPair{std::move(su), std::move(sv)};
  out.objective = prev;
  return out;
}

}  // namespace

EstimateResult tpower_scca(const EmpiricalCrossCov& emp, Index k_u, Index k_v,
                           const TPowerOptions& opts) {
  check_budgets(emp, k_u, k_v, "tpower_scca");
  if (opts.num_restarts < 1) throw std::invalid_argument("tpower_scca: need num_restarts >= 1");
  if (opts.max_iters < 1) throw std::invalid_argument("tpower_scca: need max_iters >= 1");
  const Eigen::MatrixXd& a = emp.matrix;
  constexpr int kRedraws = 3;

  RestartOutcome best;
  EstimateResult res;
  for (Index r = 0; r < opts.num_restarts; ++r) {
    ++res.restarts_used;
    Engine eng = make_engine(opts.seed, static_cast<std::uint64_t>(r));
    RestartOutcome cur;
    for (int attempt = 0; attempt <= kRedraws && !cur.ok; ++attempt) {
      cur = run_restart(a, k_u, k_v, opts, eng);
    }
    if (cur.ok && (!best.ok || cur.objective > best.objective)) best = std::move(cur);
  }

  if (!best.ok) {
    // Every restart collapsed to zero; fall back to the largest entry.
    const auto [i0, j0] = argmax_abs_entry(a);
    res.u_hat = Eigen::VectorXd::Unit(a.rows(), i0);
    res.v_hat = Eigen::VectorXd::Unit(a.cols(), j0);
    res.final_supports = SupportPair{{i0}, {j0}};
    res.objective = a(i0, j0);
    res.converged = false;
    res.degenerate = true;
    return res;
  }
  res.u_hat = std::move(best.u);
  res.v_hat = std::move(best.v);
  res.final_supports = std::move(best.supports);
  res.trace = std::move(best.trace);
  res.objective = best.objective;
  res.converged = best.converged;
  return res;
}

EstimationError estimation_error(const EstimateResult& result, const CanonicalModel& truth) {
  if (result.u_hat.size() != truth.n1() || result.v_hat.size() != truth.n2()) {
    throw std::invalid_argument("estimation_error: dimension mismatch");
  }
  EstimationError e;
  e.err_u = sin_angle(result.u_hat, truth.u().values);
  e.err_v = sin_angle(result.v_hat, truth.v().values);
  e.err_max = std::max(e.err_u, e.err_v);
  return e;
}

}  // namespace bisep

#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bisep/config.hpp"
#include "bisep/estimators.hpp"
#include "bisep/experiments.hpp"
#include "bisep/model.hpp"
#include "bisep/profiles.hpp"
#include "bisep/spectral.hpp"
#include "bisep/verify.hpp"

namespace py = pybind11;
using namespace bisep;

namespace {

void define_profiles(py::module_& m) {
  py::enum_<ProfileKind>(m, "ProfileKind")
      .value("Flat", ProfileKind::Flat)
      .value("PowerLaw", ProfileKind::PowerLaw)
      .value("Exponential", ProfileKind::Exponential);

  py::class_<SignalProfile>(m, "SignalProfile")
      .def_static("flat", &SignalProfile::flat)
      .def_static("power_law", &SignalProfile::power_law, py::arg("alpha"))
      .def_static("exponential", &SignalProfile::exponential)
      .def_static("parse", &SignalProfile::parse)
      .def_readonly("kind", &SignalProfile::kind)
      .def_readonly("alpha", &SignalProfile::alpha)
      .def("__repr__", [](const SignalProfile& p) { return "SignalProfile(" + p.to_string() + ")"; })
      .def("__str__", &SignalProfile::to_string)
      .def(py::self == py::self);

  py::class_<SparseSignal>(m, "SparseSignal")
      .def_readonly("values", &SparseSignal::values)
      .def_readonly("support", &SparseSignal::support)
      .def_property_readonly("n", &SparseSignal::n)
      .def_property_readonly("k", &SparseSignal::k);

  m.def(
      "generate_signal",
      [](const SignalProfile& p, Index k, Index n, std::optional<std::uint64_t> seed) {
        return generate_signal(p, k, n, seed ? SupportRule::seeded_random(*seed) : SupportRule::first_k());
      },
      py::arg("profile"), py::arg("k"), py::arg("n"), py::arg("seed") = py::none(),
      "Unit k-sparse signal; support is the first k coordinates unless a seed is given.");
  m.def("structure_function", &structure_function, py::arg("x"), py::arg("p"));
  m.def("structure_function_asymptotic", &structure_function_asymptotic, py::arg("alpha"),
        py::arg("k"), py::arg("p"));
  m.def("structure_sequence", &structure_sequence, py::arg("profile"), py::arg("k"));
  m.def(
      "complexity_term",
      [](const std::vector<double>& su, const std::vector<double>& sv, Index k_u, Index k_v, Index n) {
        const ComplexityPeak p = complexity_term(su, sv, k_u, k_v, n);
        return py::make_tuple(p.argmax_t, p.value);
      },
      py::arg("su"), py::arg("sv"), py::arg("k_u"), py::arg("k_v"), py::arg("n"));
  m.def(
      "phase_exponent",
      [](double au, double av) {
        const PhaseExponent p = phase_exponent(au, av);
        return py::make_tuple(p.tau, p.boundary_log_penalty);
      },
      py::arg("alpha_u"), py::arg("alpha_v"));
}

void define_model(py::module_& m) {
  py::class_<CanonicalModel>(m, "CanonicalModel")
      .def(py::init<SparseSignal, SparseSignal, double>(), py::arg("u"), py::arg("v"), py::arg("rho"))
      .def_property_readonly("u", &CanonicalModel::u)
      .def_property_readonly("v", &CanonicalModel::v)
      .def_property_readonly("rho", &CanonicalModel::rho)
      .def_property_readonly("n1", &CanonicalModel::n1)
      .def_property_readonly("n2", &CanonicalModel::n2)
      .def("population_cross_cov", &CanonicalModel::population_cross_cov);

  py::class_<EmpiricalCrossCov>(m, "EmpiricalCrossCov")
      .def_readonly("matrix", &EmpiricalCrossCov::matrix)
      .def_readonly("m", &EmpiricalCrossCov::m)
      .def_readonly("seed", &EmpiricalCrossCov::seed);

  m.def("sample_empirical_cov", &sample_empirical_cov, py::arg("model"), py::arg("m"), py::arg("seed"));
  m.def(
      "make_empirical",
      [](const Eigen::MatrixXd& a, Index mm, std::uint64_t seed) { return make_empirical(a, mm, seed); },
      py::arg("matrix"), py::arg("m") = 1, py::arg("seed") = 0);
  m.def(
      "noise_matrix",
      [](const EmpiricalCrossCov& emp, const CanonicalModel& model) {
        return noise_matrix(emp, model).matrix;
      },
      py::arg("emp"), py::arg("model"));
  m.def(
      "check_noise_event",
      [](const Eigen::MatrixXd& w, Index k_u, Index k_v, Index n, Index mm, Index supports,
         std::uint64_t seed) { return check_noise_event(NoiseMatrix{w}, k_u, k_v, n, mm, supports, seed); },
      py::arg("noise"), py::arg("k_u"), py::arg("k_v"), py::arg("n"), py::arg("m"),
      py::arg("num_random_supports"), py::arg("seed"));
}

void define_spectral(py::module_& m) {
  py::class_<SingularTriplet>(m, "SingularTriplet")
      .def_readonly("sigma", &SingularTriplet::sigma)
      .def_readonly("left", &SingularTriplet::left)
      .def_readonly("right", &SingularTriplet::right)
      .def_readonly("degenerate", &SingularTriplet::degenerate)
      .def_readonly("converged", &SingularTriplet::converged)
      .def_readonly("iterations", &SingularTriplet::iterations);

  m.def(
      "restricted_svd",
      [](const Eigen::MatrixXd& a, std::vector<Index> su, std::vector<Index> sv) {
        return restricted_svd(a, SupportPair{std::move(su), std::move(sv)});
      },
      py::arg("matrix"), py::arg("s_u"), py::arg("s_v"));
  m.def("spectral_norm", [](const Eigen::MatrixXd& a) { return spectral_norm(a); }, py::arg("block"));
  m.def("top_k_indices", [](const Eigen::VectorXd& x, Index k) { return top_k_indices(x, k); },
        py::arg("x"), py::arg("k"));
  m.def("sin_angle", [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return sin_angle(a, b); },
        py::arg("a"), py::arg("b"));
  m.def("argmax_abs_entry", [](const Eigen::MatrixXd& a) { return argmax_abs_entry(a); }, py::arg("matrix"));
  m.def("wedin_rank1_bound", &wedin_rank1_bound, py::arg("sigma1"), py::arg("noise_norm"));
}

void define_estimators(py::module_& m) {
  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("t", &IterationRecord::t)
      .def_property_readonly("s_u", [](const IterationRecord& r) { return r.supports.s_u; })
      .def_property_readonly("s_v", [](const IterationRecord& r) { return r.supports.s_v; })
      .def_readonly("sigma", &IterationRecord::sigma)
      .def_readonly("captured_energy_u", &IterationRecord::captured_energy_u)
      .def_readonly("captured_energy_v", &IterationRecord::captured_energy_v)
      .def_readonly("degenerate", &IterationRecord::degenerate);

  py::class_<EstimateResult>(m, "EstimateResult")
      .def_readonly("u_hat", &EstimateResult::u_hat)
      .def_readonly("v_hat", &EstimateResult::v_hat)
      .def_property_readonly("s_u", [](const EstimateResult& r) { return r.final_supports.s_u; })
      .def_property_readonly("s_v", [](const EstimateResult& r) { return r.final_supports.s_v; })
      .def_readonly("trace", &EstimateResult::trace)
      .def_readonly("converged", &EstimateResult::converged)
      .def_readonly("degenerate", &EstimateResult::degenerate)
      .def_readonly("restarts_used", &EstimateResult::restarts_used)
      .def_readonly("objective", &EstimateResult::objective);

  m.def(
      "bi_sep",
      [](const EmpiricalCrossCov& emp, Index k_u, Index k_v, const CanonicalModel* truth) {
        return bi_sep(emp, k_u, k_v, truth);
      },
      py::arg("emp"), py::arg("k_u"), py::arg("k_v"), py::arg("truth") = nullptr);
  m.def(
      "tpower_scca",
      [](const EmpiricalCrossCov& emp, Index k_u, Index k_v, Index restarts, Index max_iters,
         std::uint64_t seed) {
        TPowerOptions o;
        o.num_restarts = restarts;
        o.max_iters = max_iters;
        o.seed = seed;
        return tpower_scca(emp, k_u, k_v, o);
      },
      py::arg("emp"), py::arg("k_u"), py::arg("k_v"), py::arg("num_restarts") = 20,
      py::arg("max_iters") = 200, py::arg("seed") = 0);
  m.def(
      "estimation_error",
      [](const EstimateResult& r, const CanonicalModel& truth) {
        const EstimationError e = estimation_error(r, truth);
        return py::make_tuple(e.err_u, e.err_v, e.err_max);
      },
      py::arg("result"), py::arg("truth"));
}

void define_experiments(py::module_& m) {
  m.def("predict_required_m", &predict_required_m, py::arg("profile_u"), py::arg("profile_v"),
        py::arg("k_u"), py::arg("k_v"), py::arg("n"), py::arg("gamma") = 0.5, py::arg("rho") = 0.8);

  m.def(
      "run_experiment",
      [](const std::string& ini_text, const std::vector<std::string>& overrides, bool small) {
        ExperimentConfig cfg;
        try {
          cfg = parse_config(ini_text, overrides, small);
        } catch (const ConfigError& e) {
          throw py::value_error(e.what());
        }
        std::vector<TrialRecord> recs;
        {
          py::gil_scoped_release release;
          recs = run_experiment(cfg);
        }
        py::list out;
        for (const TrialRecord& r : recs) {
          py::dict d;
          d["experiment"] = r.label();
          d["sweep_axis"] = r.sweep_axis;
          d["sweep_value"] = r.sweep_value;
          d["method"] = method_name(r.method);
          d["trial"] = r.trial;
          d["err_u"] = r.err_u;
          d["err_v"] = r.err_v;
          d["err_max"] = r.err_max;
          d["runtime_s"] = cfg.timing ? r.runtime_s : 0.0;  // same rule as the CSV writer
          d["seed"] = r.seed;
          d["flag"] = r.flag;
          out.append(d);
        }
        return out;
      },
      py::arg("config"), py::arg("overrides") = std::vector<std::string>{}, py::arg("small") = false,
      "Run an experiment from INI text; returns one dict per trial record.");

  m.def("verify", [](std::uint64_t seed) {
    py::list out;
    for (const CheckResult& c : run_verification(seed)) out.append(py::make_tuple(c.name, c.passed, c.detail));
    return out;
  }, py::arg("seed") = 7);
}

}  // namespace

PYBIND11_MODULE(_bisep, m) {
  m.doc() = "Sparse canonical pair recovery by bilateral stagewise support pursuit";
  define_profiles(m);
  define_model(m);
  define_spectral(m);
  define_estimators(m);
  define_experiments(m);
}

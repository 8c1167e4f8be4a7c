#include "spotiv/dgp.hpp"
#include "spotiv/error.hpp"
#include "spotiv/io.hpp"
#include "spotiv/pipeline.hpp"
#include "spotiv/simulation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace spotiv;

namespace {

Dataset make_dataset(const Eigen::VectorXd& y, const Eigen::VectorXd& d, const Eigen::MatrixXd& W,
                     std::optional<Eigen::Index> pz, std::optional<std::string> kind) {
  Dataset data;
  data.y = y;
  data.d = d;
  data.W = W;
  data.pz = pz.value_or(W.cols());
  if (kind) {
    if (*kind == "binary") {
      data.kind = OutcomeKind::Binary;
    } else if (*kind == "continuous") {
      data.kind = OutcomeKind::Continuous;
    } else {
      throw Error(ErrorCode::InvalidArgument, "kind must be 'binary' or 'continuous'");
    }
  } else {
    bool binary = true;
    for (Eigen::Index i = 0; i < y.size(); ++i) binary = binary && (y[i] == 0.0 || y[i] == 1.0);
    data.kind = binary ? OutcomeKind::Binary : OutcomeKind::Continuous;
  }
  return data;
}

PHatSource parse_source(const std::string& s) {
  if (s == "logistic") return PHatSource::Logistic;
  if (s == "kernel") return PHatSource::Kernel;
  throw Error(ErrorCode::InvalidArgument, "p_hat source must be 'logistic' or 'kernel'");
}

PipelineOptions pipeline_options(double threshold_constant, double c0, Eigen::Index n_slices,
                                 const std::optional<Eigen::VectorXd>& bandwidth,
                                 const std::string& p_hat) {
  PipelineOptions options;
  options.first_stage.threshold_constant = threshold_constant;
  options.sir.c0 = c0;
  options.sir.n_slices = n_slices;
  if (bandwidth) options.bandwidth = *bandwidth;
  options.majority.source = parse_source(p_hat);
  return options;
}

EvalPoint make_point(double d, double d_prime, const std::optional<Eigen::VectorXd>& w,
                     Eigen::Index p) {
  EvalPoint point = default_eval_point(p);
  point.d = d;
  point.d_prime = d_prime;
  if (w) point.w = *w;
  return point;
}

py::dict params_dict(const StructuralParams& par) {
  py::dict out;
  out["beta"] = par.beta;
  out["kappa"] = par.kappa;
  out["eta"] = par.eta;
  out["gamma"] = par.gamma;
  out["rho_v"] = par.rho_v;
  return out;
}

std::vector<Eigen::Index> one_based(const std::vector<Eigen::Index>& s) {
  std::vector<Eigen::Index> out;
  for (auto j : s) out.push_back(j + 1);
  return out;
}

}  // namespace

PYBIND11_MODULE(_spotiv, m) {
  m.doc() = "CATE estimation with possibly invalid instruments";

  static py::exception<Error> error(m, "SpotivError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = std::string(to_string(e.code())) + ": " + e.what();
      PyErr_SetString(error.ptr(), msg.c_str());
    }
  });

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("y"), py::arg("d"), py::arg("W"),
           py::arg("pz") = py::none(), py::arg("kind") = py::none())
      .def_readwrite("y", &Dataset::y)
      .def_readwrite("d", &Dataset::d)
      .def_readwrite("W", &Dataset::W)
      .def_readwrite("pz", &Dataset::pz)
      .def_property_readonly("kind", [](const Dataset& d) { return std::string(to_string(d.kind)); })
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("p", &Dataset::p);

  py::class_<FirstStageFit>(m, "FirstStageFit")
      .def_readonly("gamma_hat", &FirstStageFit::gamma_hat)
      .def_readonly("v_hat", &FirstStageFit::v_hat)
      .def_readonly("sigma_v_hat", &FirstStageFit::sigma_v_hat)
      .def_readonly("Sigma_hat", &FirstStageFit::Sigma_hat)
      .def_readonly("Sigma_hat_inv_sqrt", &FirstStageFit::Sigma_hat_inv_sqrt)
      .def_readonly("condition_number", &FirstStageFit::condition_number)
      .def_property_readonly("S_hat", [](const FirstStageFit& f) { return one_based(f.S_hat); })
      .def_readonly("warning", &FirstStageFit::warning);

  py::class_<SirFit>(m, "SirFit")
      .def_readonly("Omega_hat", &SirFit::Omega_hat)
      .def_readonly("eigenvalues", &SirFit::eigenvalues)
      .def_readonly("eigenvectors", &SirFit::eigenvectors)
      .def_readonly("M_hat", &SirFit::M_hat)
      .def_readonly("Theta_hat", &SirFit::Theta_hat);

  py::class_<StructuralFit>(m, "StructuralFit")
      .def_readonly("b_hat", &StructuralFit::b_hat)
      .def_readonly("B_hat", &StructuralFit::B_hat)
      .def_readonly("ratios", &StructuralFit::ratios);

  py::class_<MajorityTestResult>(m, "MajorityTestResult")
      .def_readonly("passed", &MajorityTestResult::passed)
      .def_readonly("ridge_fallback", &MajorityTestResult::ridge_fallback)
      .def_property_readonly("votes", [](const MajorityTestResult& r) {
        std::map<Eigen::Index, Eigen::Index> out;
        for (const auto& [k, c] : r.votes) out[k + 1] = c;
        return out;
      });

  py::class_<CateResult>(m, "CateResult")
      .def_readonly("phi_d", &CateResult::phi_d)
      .def_readonly("phi_dprime", &CateResult::phi_dprime)
      .def_readonly("cate", &CateResult::cate)
      .def_readonly("plug_in_se", &CateResult::plug_in_se)
      .def_readonly("boot_se", &CateResult::boot_se)
      .def_readonly("ci", &CateResult::ci)
      .def_readonly("n_boot", &CateResult::n_boot)
      .def_readonly("dropped_points", &CateResult::dropped_points)
      .def_readonly("bandwidths", &CateResult::bandwidths);

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("first_stage", &Estimate::first_stage)
      .def_readonly("sir", &Estimate::sir)
      .def_readonly("structural", &Estimate::structural)
      .def_readonly("majority", &Estimate::majority)
      .def_readonly("cate", &Estimate::cate);

  py::class_<BootstrapResult>(m, "BootstrapResult")
      .def_readonly("se", &BootstrapResult::se)
      .def_readonly("ci", &BootstrapResult::ci)
      .def_readonly("draws", &BootstrapResult::draws)
      .def_readonly("failures", &BootstrapResult::failures);

  m.def(
      "generate",
      [](const std::string& scenario, Eigen::Index n, double c_gamma, const std::string& z_dist,
         std::uint64_t seed) {
        const ScenarioSpec spec{parse_scenario(scenario), n, c_gamma, parse_zdist(z_dist), seed};
        auto sim = generate(spec);
        return py::make_tuple(sim.data, params_dict(sim.params));
      },
      py::arg("scenario") = "binary_i", py::arg("n") = 1000, py::arg("c_gamma") = 0.8,
      py::arg("z_dist") = "normal", py::arg("seed") = 1,
      "Simulate a dataset; returns (Dataset, true parameters).");

  m.def("validate", &validate, py::arg("data"));

  m.def("read_csv", [](const std::string& path) { return read_dataset_csv(path); },
        py::arg("path"));

  m.def(
      "fit_first_stage",
      [](const Dataset& data, double threshold_constant) {
        return fit_first_stage(data, {.threshold_constant = threshold_constant});
      },
      py::arg("data"), py::arg("threshold_constant") = 2.0);

  m.def(
      "fit_sir",
      [](const Dataset& data, const FirstStageFit& fs, double c0, Eigen::Index n_slices) {
        return fit_sir(data, fs, {.c0 = c0, .n_slices = n_slices});
      },
      py::arg("data"), py::arg("first_stage"), py::arg("c0") = 0.5, py::arg("n_slices") = 10);

  m.def("select_rank", &select_rank, py::arg("eigenvalues"), py::arg("n"), py::arg("p"),
        py::arg("c0") = 0.5);

  m.def(
      "fit_structural",
      [](const Eigen::MatrixXd& theta, const Eigen::VectorXd& gamma,
         const std::vector<Eigen::Index>& S_hat) {
        std::vector<Eigen::Index> zero_based;
        for (auto j : S_hat) zero_based.push_back(j - 1);
        return fit_structural(theta, gamma, zero_based);
      },
      py::arg("Theta"), py::arg("gamma"), py::arg("S_hat"),
      "Median-of-ratios fit; S_hat holds one-based instrument indices.");

  m.def(
      "fit_structural_from",
      [](const SirFit& sir, const FirstStageFit& fs) { return fit_structural(sir, fs); },
      py::arg("sir"), py::arg("first_stage"));

  m.def(
      "majority_vote_test",
      [](const SirFit& sir, const FirstStageFit& fs, const Dataset& data,
         const std::string& p_hat) {
        return majority_vote_test(sir, fs, data, {.source = parse_source(p_hat)});
      },
      py::arg("sir"), py::arg("first_stage"), py::arg("data"), py::arg("p_hat") = "logistic");

  m.def(
      "estimate",
      [](const Dataset& data, double d, double d_prime, std::optional<Eigen::VectorXd> w,
         double threshold_constant, double c0, Eigen::Index n_slices,
         std::optional<Eigen::VectorXd> bandwidth, const std::string& p_hat) {
        return estimate(data, make_point(d, d_prime, w, data.p()),
                        pipeline_options(threshold_constant, c0, n_slices, bandwidth, p_hat));
      },
      py::arg("data"), py::arg("d") = -1.0, py::arg("d_prime") = 2.0, py::arg("w") = py::none(),
      py::arg("threshold_constant") = 2.0, py::arg("c0") = 0.5, py::arg("n_slices") = 10,
      py::arg("bandwidth") = py::none(), py::arg("p_hat") = "logistic",
      "Full pipeline at one evaluation point. w defaults to (0, ..., 0, 0.1).");

  m.def(
      "estimate_with_bootstrap",
      [](const Dataset& data, double d, double d_prime, std::optional<Eigen::VectorXd> w,
         Eigen::Index n_boot, double alpha, std::uint64_t seed, unsigned threads) {
        py::gil_scoped_release release;
        return estimate_with_bootstrap(data, make_point(d, d_prime, w, data.p()), {}, n_boot,
                                       alpha, seed, threads);
      },
      py::arg("data"), py::arg("d") = -1.0, py::arg("d_prime") = 2.0, py::arg("w") = py::none(),
      py::arg("n_boot") = 50, py::arg("alpha") = 0.05, py::arg("seed") = 1,
      py::arg("threads") = 1);

  m.def(
      "bootstrap",
      [](const Dataset& data, double d, double d_prime, std::optional<Eigen::VectorXd> w,
         Eigen::Index n_boot, double alpha, std::uint64_t seed, double center, unsigned threads) {
        py::gil_scoped_release release;
        return bootstrap_ci(make_point(d, d_prime, w, data.p()), data, {}, n_boot, alpha, seed,
                            center, threads);
      },
      py::arg("data"), py::arg("d") = -1.0, py::arg("d_prime") = 2.0, py::arg("w") = py::none(),
      py::arg("n_boot") = 50, py::arg("alpha") = 0.05, py::arg("seed") = 1,
      py::arg("center") = 0.0, py::arg("threads") = 1);

  m.def(
      "true_cate_oracle",
      [](const std::string& scenario, double c_gamma, const std::string& z_dist,
         std::uint64_t seed, double d, double d_prime, std::optional<Eigen::VectorXd> w,
         std::int64_t n_mc) {
        const ScenarioSpec spec{parse_scenario(scenario), 1000, c_gamma, parse_zdist(z_dist), seed};
        return true_cate_oracle(spec, make_point(d, d_prime, w, kSimulatedInstruments), n_mc);
      },
      py::arg("scenario") = "binary_i", py::arg("c_gamma") = 0.8, py::arg("z_dist") = "normal",
      py::arg("seed") = 1, py::arg("d") = -1.0, py::arg("d_prime") = 2.0,
      py::arg("w") = py::none(), py::arg("n_mc") = 1'000'000);

  m.def(
      "simulate_cell",
      [](const std::string& scenario, Eigen::Index n, double c_gamma, const std::string& z_dist,
         Eigen::Index replications, Eigen::Index n_boot, std::uint64_t seed,
         std::int64_t oracle_draws, unsigned threads) {
        SimulationConfig config;
        config.cell = ScenarioSpec{parse_scenario(scenario), n, c_gamma, parse_zdist(z_dist)};
        config.replications = replications;
        config.n_boot = n_boot;
        config.seed = seed;
        config.oracle_draws = oracle_draws;
        config.threads = threads;
        SimulationReport report;
        {
          py::gil_scoped_release release;
          report.rows.push_back(run_cell(config));
        }
        return to_json(report.rows.front()).dump();
      },
      py::arg("scenario") = "binary_i", py::arg("n") = 1000, py::arg("c_gamma") = 0.8,
      py::arg("z_dist") = "normal", py::arg("replications") = 200, py::arg("n_boot") = 50,
      py::arg("seed") = 1, py::arg("oracle_draws") = 1'000'000, py::arg("threads") = 1,
      "Run one Monte Carlo cell; returns the summary row as a JSON string.");
}

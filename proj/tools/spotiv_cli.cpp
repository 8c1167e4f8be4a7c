// spotiv: estimate CATE with possibly invalid instruments, run the majority
// vote test, or run Monte Carlo cells of the simulation designs.
//
// Exit codes: 0 ok, 2 input error, 3 estimation failure.

#include "spotiv/dgp.hpp"
#include "spotiv/error.hpp"
#include "spotiv/io.hpp"
#include "spotiv/parallel.hpp"
#include "spotiv/pipeline.hpp"
#include "spotiv/simulation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kExitInput = 2;
constexpr int kExitEstimation = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Args {
  std::string mode = "estimate";
  std::string input;
  std::optional<long> pz;
  std::string outcome;
  bool center = false;
  std::string config;
  std::string scenario = "binary_i";
  std::vector<long> n{1000};
  std::vector<double> c_gamma{0.8};
  std::string z_dist = "normal";
  long reps = 200;
  long n_boot = 50;
  double alpha = 0.05;
  double c0 = 0.5;
  long n_slices = 10;
  std::vector<double> bandwidth;
  std::string eval = "default";
  std::optional<double> eval_d;
  std::optional<double> eval_dprime;
  std::vector<double> eval_w;
  std::string p_hat = "logistic";
  std::uint64_t seed = 1;
  long oracle_draws = 1'000'000;
  bool timing = false;
  std::string out;
  std::string format = "json";
};

spotiv::EvalPoint eval_point(const Args& args, Eigen::Index p) {
  spotiv::EvalPoint point = spotiv::default_eval_point(p);
  if (args.eval != "default" && args.eval != "paper-default" && args.eval != "custom") {
    throw InputError("unknown --eval preset '" + args.eval + "'");
  }
  if (args.eval_d) point.d = *args.eval_d;
  if (args.eval_dprime) point.d_prime = *args.eval_dprime;
  if (!args.eval_w.empty()) {
    if (static_cast<Eigen::Index>(args.eval_w.size()) != p) {
      throw InputError("--eval-w has " + std::to_string(args.eval_w.size()) +
                       " entries but the design has p = " + std::to_string(p));
    }
    point.w = Eigen::Map<const Eigen::VectorXd>(args.eval_w.data(), p);
  }
  return point;
}

spotiv::PipelineOptions pipeline_options(const Args& args) {
  spotiv::PipelineOptions options;
  options.sir.c0 = args.c0;
  options.sir.n_slices = args.n_slices;
  if (!args.bandwidth.empty()) {
    options.bandwidth = Eigen::Map<const Eigen::VectorXd>(args.bandwidth.data(),
                                                          static_cast<Eigen::Index>(args.bandwidth.size()));
  }
  if (args.p_hat == "kernel") {
    options.majority.source = spotiv::PHatSource::Kernel;
  } else if (args.p_hat != "logistic") {
    throw InputError("unknown --p-hat source '" + args.p_hat + "'");
  }
  return options;
}

spotiv::Dataset load_input(const Args& args) {
  if (args.input.empty()) throw InputError("--input is required in this mode");
  spotiv::CsvOptions csv;
  if (args.pz) csv.pz = *args.pz;
  if (args.outcome == "binary") {
    csv.kind = spotiv::OutcomeKind::Binary;
  } else if (args.outcome == "continuous") {
    csv.kind = spotiv::OutcomeKind::Continuous;
  } else if (!args.outcome.empty()) {
    throw InputError("unknown --outcome '" + args.outcome + "'");
  }
  spotiv::Dataset data = spotiv::read_dataset_csv(args.input, csv);
  if (args.center) data = spotiv::center(std::move(data));
  return spotiv::validate(std::move(data));
}

void emit(const Args& args, const std::string& text) {
  if (args.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(args.out, std::ios::binary);
  if (!file) throw InputError("cannot write '" + args.out + "'");
  file << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int run_estimate(const Args& args) {
  const spotiv::Dataset data = load_input(args);
  const spotiv::EvalPoint point = eval_point(args, data.p());
  const auto options = pipeline_options(args);
  spotiv::Estimate est;
  try {
    est = spotiv::estimate_with_bootstrap(data, point, options, args.n_boot, args.alpha, args.seed,
                                          spotiv::default_threads());
  } catch (const spotiv::Error& e) {
    std::cerr << "estimation failed [" << spotiv::to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitEstimation;
  }
  json report = spotiv::to_json(est, point);
  report["alpha"] = args.alpha;
  report["seed"] = args.seed;
  report["n"] = data.n();
  report["pz"] = data.pz;
  report["outcome"] = std::string(spotiv::to_string(data.kind));
  emit(args, dump(report));
  return 0;
}

int run_majority(const Args& args) {
  spotiv::Dataset data;
  if (!args.input.empty()) {
    data = load_input(args);
  } else {
    spotiv::ScenarioSpec spec;
    spec.scenario = spotiv::parse_scenario(args.scenario);
    spec.n = args.n.front();
    spec.c_gamma = args.c_gamma.front();
    spec.z_dist = spotiv::parse_zdist(args.z_dist);
    spec.seed = args.seed;
    data = spotiv::generate(spec).data;
  }
  const auto options = pipeline_options(args);
  try {
    const auto fs = spotiv::fit_first_stage(data, options.first_stage);
    const auto sir = spotiv::fit_sir(data, fs, options.sir);
    const auto test = spotiv::majority_vote_test(sir, fs, data, options.majority);
    json votes = json::object();
    for (const auto& [k, c] : test.votes) votes[std::to_string(k + 1)] = c;
    json thresholds = json::array();
    for (const auto& [jk, eps] : test.thresholds) {
      thresholds.push_back({{"j", jk.first + 1}, {"k", jk.second + 1}, {"eps", eps}});
    }
    json S = json::array();
    for (auto j : fs.S_hat) S.push_back(j + 1);
    emit(args, dump({{"passed", test.passed},
                     {"S_hat", S},
                     {"votes", votes},
                     {"thresholds", thresholds},
                     {"p_hat_source", args.p_hat},
                     {"ridge_fallback", test.ridge_fallback}}));
  } catch (const spotiv::Error& e) {
    std::cerr << "majority test failed [" << spotiv::to_string(e.code()) << "]: " << e.what()
              << "\n";
    return kExitEstimation;
  }
  return 0;
}

int run_simulate(const Args& args) {
  spotiv::ScenarioSpec base;
  std::vector<spotiv::ScenarioSpec> cells;
  if (!args.config.empty()) {
    std::ifstream in(args.config);
    if (!in) throw InputError("cannot open config '" + args.config + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
    const json list = j.is_array() ? j : json::array({j});
    for (const auto& item : list) cells.push_back(spotiv::scenario_from_json(item));
  } else {
    base.scenario = spotiv::parse_scenario(args.scenario);
    base.z_dist = spotiv::parse_zdist(args.z_dist);
    for (long n : args.n) {
      for (double c : args.c_gamma) {
        spotiv::ScenarioSpec spec = base;
        spec.n = n;
        spec.c_gamma = c;
        cells.push_back(spec);
      }
    }
  }
  if (args.reps < 1) throw InputError("--reps must be at least 1");

  spotiv::SimulationReport report;
  for (const auto& cell : cells) {
    spotiv::SimulationConfig config;
    config.cell = cell;
    config.replications = args.reps;
    config.n_boot = args.n_boot;
    config.alpha = args.alpha;
    config.pipeline = pipeline_options(args);
    config.point = eval_point(args, spotiv::kSimulatedInstruments);
    config.oracle_draws = args.oracle_draws;
    config.seed = args.config.empty() ? args.seed : cell.seed;
    config.threads = spotiv::default_threads();
    config.record_timing = args.timing;
    try {
      report.rows.push_back(spotiv::run_cell(config));
    } catch (const spotiv::Error& e) {
      std::cerr << "cell " << spotiv::to_string(cell.scenario) << " n=" << cell.n
                << " c_gamma=" << cell.c_gamma << " failed: " << e.what() << "\n";
      return kExitEstimation;
    }
  }
  if (args.format == "csv") {
    std::ostringstream os;
    spotiv::write_simulation_csv(os, report);
    emit(args, os.str());
  } else {
    emit(args, dump(spotiv::to_json(report)));
  }
  return 0;
}

int run_generate(const Args& args) {
  spotiv::ScenarioSpec spec;
  spec.scenario = spotiv::parse_scenario(args.scenario);
  spec.n = args.n.front();
  spec.c_gamma = args.c_gamma.front();
  spec.z_dist = spotiv::parse_zdist(args.z_dist);
  spec.seed = args.seed;
  std::ostringstream os;
  spotiv::write_dataset_csv(os, spotiv::generate(spec).data);
  emit(args, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SpotIV: causal effects with possibly invalid instruments"};
  Args args;
  app.add_option("--mode", args.mode, "estimate | simulate | majority-test | generate")
      ->check(CLI::IsMember({"estimate", "simulate", "majority-test", "generate"}));
  app.add_option("--input", args.input, "CSV with header y,d,z1..,x1..");
  app.add_option("--pz", args.pz, "number of instrument columns (default: columns named z*)");
  app.add_option("--outcome", args.outcome, "binary | continuous (default: inferred)");
  app.add_flag("--center", args.center, "center y (continuous), d and W before estimation");
  app.add_option("--config", args.config, "JSON scenario spec or array of specs (simulate)");
  app.add_option("--scenario", args.scenario, "binary_i | continuous_ii | violation_a | violation_b");
  app.add_option("--n", args.n, "sample size(s)")->delimiter(',');
  app.add_option("--c-gamma", args.c_gamma, "IV strength multiplier(s)")->delimiter(',');
  app.add_option("--z-dist", args.z_dist, "normal | uniform");
  app.add_option("--reps", args.reps, "Monte Carlo replications per cell");
  app.add_option("--n-boot", args.n_boot, "bootstrap resamples");
  app.add_option("--alpha", args.alpha, "CI level is 1 - alpha");
  app.add_option("--c0", args.c0, "rank-selection penalty exponent");
  app.add_option("--n-slices", args.n_slices, "SIR slices for continuous outcomes");
  app.add_option("--bandwidth", args.bandwidth, "fixed bandwidth(s); default rule of thumb")
      ->delimiter(',');
  app.add_option("--eval", args.eval, "evaluation preset: default | custom");
  app.add_option("--eval-d", args.eval_d, "exposure level d");
  app.add_option("--eval-dprime", args.eval_dprime, "comparison exposure level d'");
  app.add_option("--eval-w", args.eval_w, "covariate vector w")->delimiter(',');
  app.add_option("--p-hat", args.p_hat, "majority test p_hat source: logistic | kernel");
  app.add_option("--seed", args.seed, "master seed");
  app.add_option("--oracle-draws", args.oracle_draws, "Monte Carlo draws of the true-CATE oracle");
  app.add_flag("--timing", args.timing, "record wall time in simulation reports");
  app.add_option("--out", args.out, "output path (default stdout)");
  app.add_option("--format", args.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (args.mode == "estimate") return run_estimate(args);
    if (args.mode == "simulate") return run_simulate(args);
    if (args.mode == "majority-test") return run_majority(args);
    return run_generate(args);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const spotiv::Error& e) {
    std::cerr << "input error [" << spotiv::to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitInput;
  }
}

#include "spotiv/simulation.hpp"

#include "spotiv/error.hpp"
#include "spotiv/median.hpp"
#include "spotiv/parallel.hpp"
#include "spotiv/rng.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace spotiv {

std::uint64_t replication_seed(std::uint64_t seed, Eigen::Index rep) {
  return stream_seed(seed, static_cast<std::uint64_t>(rep), StreamRole::Replication);
}

double cell_truth(const SimulationConfig& config) {
  return true_cate_oracle(config.cell.scenario, default_params(config.cell), config.point,
                          config.oracle_draws, config.seed);
}

ReplicationRecord run_replication(const SimulationConfig& config, Eigen::Index rep,
                                  std::optional<double> cached_truth) {
  ReplicationRecord record;
  record.index = rep;
  ScenarioSpec spec = config.cell;
  spec.seed = replication_seed(config.seed, rep);
  const Simulated sim = generate(spec);
  record.truth = cached_truth ? *cached_truth
                              : true_cate_oracle(spec.scenario, sim.params, config.point,
                                                 config.oracle_draws, spec.seed);
  try {
    PipelineOptions options = config.pipeline;
    options.plug_in_se = false;
    const Estimate est =
        estimate_with_bootstrap(sim.data, config.point, options, config.n_boot, config.alpha,
                                stream_seed(config.seed, static_cast<std::uint64_t>(rep),
                                            StreamRole::Bootstrap),
                                1);
    record.ok = true;
    record.cate = est.cate.cate;
    record.boot_se = est.cate.boot_se;
    record.covered = est.cate.ci.first <= record.truth && record.truth <= est.cate.ci.second;
    if (est.majority) record.majority_passed = est.majority->passed;
    record.dropped = est.cate.dropped_points;
    record.M_hat = est.sir.M_hat;
    record.S_size = static_cast<Eigen::Index>(est.first_stage.S_hat.size());
  } catch (const Error&) {
    record.ok = false;
  }
  return record;
}

SimulationRow run_cell(const SimulationConfig& config, std::vector<ReplicationRecord>* records) {
  if (config.replications < 1) {
    throw Error(ErrorCode::InvalidArgument, "replications must be at least 1");
  }
  const auto started = std::chrono::steady_clock::now();
  std::optional<double> truth;
  if (config.cell.scenario != Scenario::ViolationB) truth = cell_truth(config);

  std::vector<ReplicationRecord> recs(static_cast<std::size_t>(config.replications));
  parallel_for(recs.size(), config.threads, [&](std::size_t r) {
    recs[r] = run_replication(config, static_cast<Eigen::Index>(r), truth);
  });

  SimulationRow row;
  row.scenario = config.cell.scenario;
  row.n = config.cell.n;
  row.c_gamma = config.cell.c_gamma;
  row.z_dist = config.cell.z_dist;
  row.replications = config.replications;

  std::vector<double> abs_err;
  double covered = 0.0, se = 0.0, dropped = 0.0, truth_sum = 0.0, passed = 0.0;
  Eigen::Index tested = 0;
  for (const auto& r : recs) {
    if (!r.ok) {
      ++row.failures;
      continue;
    }
    abs_err.push_back(std::abs(r.cate - r.truth));
    covered += r.covered;
    se += r.boot_se;
    dropped += static_cast<double>(r.dropped);
    truth_sum += r.truth;
    if (r.majority_passed) {
      ++tested;
      passed += *r.majority_passed;
    }
  }
  if (static_cast<double>(row.failures) >= 0.05 * static_cast<double>(config.replications)) {
    throw Error(ErrorCode::BootstrapExhausted,
                std::to_string(row.failures) + " of " + std::to_string(config.replications) +
                    " replications failed");
  }
  const double ok = static_cast<double>(abs_err.size());
  row.mae = median(abs_err);
  row.cov = covered / ok;
  row.se = se / ok;
  row.dropped_mean = dropped / ok;
  row.truth = truth_sum / ok;
  if (tested > 0) row.mt = passed / static_cast<double>(tested);
  if (config.record_timing) {
    row.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  }
  if (records) *records = std::move(recs);
  return row;
}

}  // namespace spotiv

#pragma once

#include "spotiv/dgp.hpp"
#include "spotiv/pipeline.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace spotiv {

struct SimulationConfig {
  ScenarioSpec cell;
  Eigen::Index replications = 200;
  Eigen::Index n_boot = 50;
  double alpha = 0.05;
  PipelineOptions pipeline;
  EvalPoint point = default_eval_point();
  std::int64_t oracle_draws = 1'000'000;
  /// Master seed; replication, bootstrap and oracle streams derive from it.
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool record_timing = false;
};

/// Outcome of one replication.
struct ReplicationRecord {
  Eigen::Index index = 0;
  bool ok = false;
  double truth = 0.0;
  double cate = 0.0;
  double boot_se = 0.0;
  bool covered = false;
  std::optional<bool> majority_passed;
  Eigen::Index dropped = 0;
  Eigen::Index M_hat = 0;
  Eigen::Index S_size = 0;
};

/// One row of the summary table; MT is absent for continuous outcomes.
struct SimulationRow {
  Scenario scenario = Scenario::BinaryI;
  Eigen::Index n = 0;
  double c_gamma = 0.0;
  ZDist z_dist = ZDist::Normal;
  double mae = 0.0;
  double cov = 0.0;
  double se = 0.0;
  std::optional<double> mt;
  Eigen::Index replications = 0;
  Eigen::Index failures = 0;
  double dropped_mean = 0.0;
  std::optional<double> wall_time;
  double truth = 0.0;
};

struct SimulationReport {
  std::vector<SimulationRow> rows;
};

/// Seed of the dataset drawn in replication `rep`.
std::uint64_t replication_seed(std::uint64_t seed, Eigen::Index rep);

/// Cached true CATE of a cell (default parameters, oracle stream of `seed`).
double cell_truth(const SimulationConfig& config);

ReplicationRecord run_replication(const SimulationConfig& config, Eigen::Index rep,
                                  std::optional<double> cached_truth);

/// Runs every replication of one cell and aggregates MAE (median absolute
/// error), COV, mean SE and MT. Throws when 5% or more replications fail.
SimulationRow run_cell(const SimulationConfig& config,
                       std::vector<ReplicationRecord>* records = nullptr);

}  // namespace spotiv

#pragma once

#include "spotiv/data_model.hpp"
#include "spotiv/first_stage.hpp"
#include "spotiv/median.hpp"
#include "spotiv/partial_mean.hpp"
#include "spotiv/sir.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace spotiv {

struct PipelineOptions {
  FirstStageOptions first_stage;
  SirOptions sir;
  MajorityTestOptions majority;
  /// Empty: rule-of-thumb bandwidths recomputed on every (re)sample.
  Eigen::VectorXd bandwidth;
  bool run_majority_test = true;
  bool plug_in_se = true;
};

/// Everything one pass of the three-step estimator produces.
struct Estimate {
  FirstStageFit first_stage;
  SirFit sir;
  StructuralFit structural;
  std::optional<MajorityTestResult> majority;
  CateResult cate;
};

/// First stage, SIR, median rule and partial mean on one sample. The majority
/// test only runs for binary outcomes.
Estimate estimate(const Dataset& data, const EvalPoint& point, const PipelineOptions& options = {});

struct BootstrapResult {
  double se = 0.0;
  std::pair<double, double> ci{0.0, 0.0};
  double center = 0.0;
  std::vector<double> draws;
  /// Resamples on which the pipeline failed and that were redrawn.
  Eigen::Index failures = 0;
};

/// Standard normal quantile.
double normal_quantile(double prob);

/// Nonparametric bootstrap of the full pipeline (instrument selection and
/// rank selection are redone on every resample). The interval is
/// center +- z_{1-alpha/2} * sd(draws). Resample b draws its rows from
/// stream (seed, b), so results do not depend on `threads`.
BootstrapResult bootstrap_ci(const EvalPoint& point, const Dataset& data,
                             const PipelineOptions& options, Eigen::Index n_boot, double alpha,
                             std::uint64_t seed, double center, unsigned threads = 1);

/// Convenience: estimate, then bootstrap around the full-sample CATE and fill
/// the bootstrap fields of the returned CateResult.
Estimate estimate_with_bootstrap(const Dataset& data, const EvalPoint& point,
                                 const PipelineOptions& options, Eigen::Index n_boot, double alpha,
                                 std::uint64_t seed, unsigned threads = 1);

/// Row resample of `data` by `rows`.
Dataset take_rows(const Dataset& data, const std::vector<Eigen::Index>& rows);

}  // namespace spotiv

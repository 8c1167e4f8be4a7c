#include "spotiv/pipeline.hpp"

#include "spotiv/error.hpp"
#include "spotiv/parallel.hpp"
#include "spotiv/rng.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <cstdlib>
#include <string>

namespace spotiv {

unsigned default_threads() {
  if (const char* env = std::getenv("SPOTIV_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && value > 0) return static_cast<unsigned>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Estimate estimate(const Dataset& data, const EvalPoint& point, const PipelineOptions& options) {
  Estimate out;
  out.first_stage = fit_first_stage(data, options.first_stage);
  out.sir = fit_sir(data, out.first_stage, options.sir);
  out.structural = fit_structural(out.sir, out.first_stage);
  if (options.run_majority_test && data.kind == OutcomeKind::Binary) {
    out.majority = majority_vote_test(out.sir, out.first_stage, data, options.majority);
  }
  const KernelConfig H = make_kernel_config(
      sample_indices(data, out.structural, out.first_stage.v_hat), options.bandwidth);
  out.cate = estimate_cate(point, out.structural, out.first_stage, data, H, options.plug_in_se);
  return out;
}

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "quantile probability must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), prob);
}

Dataset take_rows(const Dataset& data, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.kind = data.kind;
  out.pz = data.pz;
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.y.resize(n);
  out.d.resize(n);
  out.W.resize(n, data.p());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = rows[static_cast<std::size_t>(i)];
    out.y[i] = data.y[r];
    out.d[i] = data.d[r];
    out.W.row(i) = data.W.row(r);
  }
  return out;
}

BootstrapResult bootstrap_ci(const EvalPoint& point, const Dataset& data,
                             const PipelineOptions& options, Eigen::Index n_boot, double alpha,
                             std::uint64_t seed, double center, unsigned threads) {
  if (n_boot < 2) throw Error(ErrorCode::InvalidArgument, "n_boot must be at least 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");

  PipelineOptions inner = options;
  inner.run_majority_test = false;
  inner.plug_in_se = false;

  const auto n = data.n();
  const auto max_attempts = static_cast<std::size_t>(5 * n_boot);
  const auto wanted = static_cast<std::size_t>(n_boot);

  // Attempt a uses stream (seed, a); the first n_boot successful attempts in
  // index order are kept, whatever the scheduling.
  std::vector<std::optional<double>> attempts;
  std::size_t successes = 0;
  while (successes < wanted) {
    const std::size_t begin = attempts.size();
    if (begin >= max_attempts) {
      throw Error(ErrorCode::BootstrapExhausted,
                  "bootstrap failed: only " + std::to_string(successes) + " of " +
                      std::to_string(wanted) + " resamples succeeded in " +
                      std::to_string(max_attempts) + " attempts");
    }
    const std::size_t batch = std::min(wanted - successes, max_attempts - begin);
    attempts.resize(begin + batch);
    parallel_for(batch, threads, [&](std::size_t k) {
      const std::size_t a = begin + k;
      auto rng = make_rng(seed, a, StreamRole::Bootstrap);
      std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
      std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
      for (auto& r : rows) r = pick(rng);
      try {
        attempts[a] = estimate(take_rows(data, rows), point, inner).cate.cate;
      } catch (const Error&) {
        attempts[a].reset();
      }
    });
    for (std::size_t a = begin; a < attempts.size(); ++a) successes += attempts[a].has_value();
  }

  BootstrapResult out;
  out.center = center;
  for (const auto& a : attempts) {
    if (!a) {
      ++out.failures;
    } else if (out.draws.size() < wanted) {
      out.draws.push_back(*a);
    }
  }
  double mean = 0.0;
  for (double x : out.draws) mean += x;
  mean /= static_cast<double>(out.draws.size());
  double ss = 0.0;
  for (double x : out.draws) ss += (x - mean) * (x - mean);
  out.se = std::sqrt(ss / static_cast<double>(out.draws.size() - 1));
  const double z = normal_quantile(1.0 - alpha / 2.0);
  out.ci = {center - z * out.se, center + z * out.se};
  return out;
}

Estimate estimate_with_bootstrap(const Dataset& data, const EvalPoint& point,
                                 const PipelineOptions& options, Eigen::Index n_boot, double alpha,
                                 std::uint64_t seed, unsigned threads) {
  Estimate est = estimate(data, point, options);
  const BootstrapResult boot =
      bootstrap_ci(point, data, options, n_boot, alpha, seed, est.cate.cate, threads);
  est.cate.boot_se = boot.se;
  est.cate.ci = boot.ci;
  est.cate.n_boot = n_boot;
  return est;
}

}  // namespace spotiv

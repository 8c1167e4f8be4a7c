#pragma once

#include "spotiv/data_model.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace spotiv {

enum class Scenario { BinaryI, ContinuousII, ViolationA, ViolationB };
enum class ZDist { Normal, Uniform };

std::string_view to_string(Scenario s) noexcept;
std::string_view to_string(ZDist z) noexcept;
Scenario parse_scenario(std::string_view text);
ZDist parse_zdist(std::string_view text);

OutcomeKind outcome_kind(Scenario s) noexcept;

/// Half-width of the uniform instrument distribution.
inline constexpr double kUniformHalfWidth = 1.73;
inline constexpr Eigen::Index kSimulatedInstruments = 7;

struct ScenarioSpec {
  Scenario scenario = Scenario::BinaryI;
  Eigen::Index n = 1000;
  double c_gamma = 0.8;
  ZDist z_dist = ZDist::Normal;
  std::uint64_t seed = 1;
};

/// Default structural parameters of a scenario. Violation (b) draws its
/// kappa = eta = xi_j * gamma_j from `seed`, so it is random per dataset.
StructuralParams default_params(const ScenarioSpec& spec);

struct Simulated {
  Dataset data;
  StructuralParams params;
  /// Latent first-stage error and confounder, kept for diagnostics.
  Eigen::VectorXd v;
  Eigen::VectorXd u;
};

/// Draw a dataset. With `params` set, those parameters replace the
/// scenario defaults (test overrides such as gamma_7 = 0 or beta = 0).
Simulated generate(const ScenarioSpec& spec,
                   const std::optional<StructuralParams>& params = std::nullopt);

/// Link q(a, u) of the scenario: logistic probability for binary designs,
/// (a + u) + (a + u)^2 / 3 for the continuous design.
double outcome_link(Scenario s, double index_plus_u) noexcept;

/// Monte Carlo value of phi*(d, w) - phi*(d', w): averages q(d beta + w'kappa, u)
/// over n_mc draws of u = rho_v v + w'eta + xi with common random numbers.
double true_cate_oracle(Scenario scenario, const StructuralParams& params,
                        const EvalPoint& point, std::int64_t n_mc, std::uint64_t seed);

/// Oracle at default_params(spec). For violation (b) this is the truth of the
/// dataset generated from the same spec, since its parameters derive from the seed.
double true_cate_oracle(const ScenarioSpec& spec, const EvalPoint& point, std::int64_t n_mc);

}  // namespace spotiv

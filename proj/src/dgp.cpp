#include "spotiv/dgp.hpp"

#include "spotiv/error.hpp"
#include "spotiv/rng.hpp"

#include <cmath>
#include <string>

namespace spotiv {

std::string_view to_string(Scenario s) noexcept {
  switch (s) {
    case Scenario::BinaryI: return "binary_i";
    case Scenario::ContinuousII: return "continuous_ii";
    case Scenario::ViolationA: return "violation_a";
    case Scenario::ViolationB: return "violation_b";
  }
  return "unknown";
}

std::string_view to_string(ZDist z) noexcept {
  return z == ZDist::Normal ? "normal" : "uniform";
}

Scenario parse_scenario(std::string_view text) {
  if (text == "binary_i") return Scenario::BinaryI;
  if (text == "continuous_ii") return Scenario::ContinuousII;
  if (text == "violation_a") return Scenario::ViolationA;
  if (text == "violation_b") return Scenario::ViolationB;
  throw Error(ErrorCode::InvalidArgument, "unknown scenario '" + std::string(text) + "'");
}

ZDist parse_zdist(std::string_view text) {
  if (text == "normal") return ZDist::Normal;
  if (text == "uniform") return ZDist::Uniform;
  throw Error(ErrorCode::InvalidArgument, "unknown z distribution '" + std::string(text) + "'");
}

OutcomeKind outcome_kind(Scenario s) noexcept {
  return s == Scenario::ContinuousII ? OutcomeKind::Continuous : OutcomeKind::Binary;
}

namespace {

void check_spec(const ScenarioSpec& spec) {
  if (spec.n <= 0) throw Error(ErrorCode::InvalidArgument, "scenario n must be positive");
  if (!(spec.c_gamma > 0.0) || !std::isfinite(spec.c_gamma)) {
    throw Error(ErrorCode::InvalidArgument, "c_gamma must be positive");
  }
}

}  // namespace

StructuralParams default_params(const ScenarioSpec& spec) {
  check_spec(spec);
  constexpr Eigen::Index p = kSimulatedInstruments;
  StructuralParams params;
  params.beta = 0.25;
  params.rho_v = 0.25;
  params.gamma.resize(p);
  params.gamma << 1, 1, 1, -1, -1, -1, -1;
  params.gamma *= spec.c_gamma;

  params.kappa.resize(p);
  switch (spec.scenario) {
    case Scenario::BinaryI:
    case Scenario::ContinuousII:
      params.kappa << 0, 0, 0, 0, 0, 0.4, 0.2;
      break;
    case Scenario::ViolationA:
      params.kappa << 0.4, 0.4, 0.4, 0, 0.4, 0.4, 0.4;
      break;
    case Scenario::ViolationB: {
      auto rng = make_rng(spec.seed, 1, StreamRole::Data);
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      for (Eigen::Index j = 0; j < p; ++j) params.kappa[j] = unif(rng) * params.gamma[j];
      break;
    }
  }
  params.eta = params.kappa;
  return params;
}

double outcome_link(Scenario s, double a) noexcept {
  if (s == Scenario::ContinuousII) return a + a * a / 3.0;
  return 1.0 / (1.0 + std::exp(-a));
}

Simulated generate(const ScenarioSpec& spec, const std::optional<StructuralParams>& params) {
  check_spec(spec);
  Simulated out;
  out.params = params ? *params : default_params(spec);
  const auto& truth = out.params;
  const Eigen::Index n = spec.n;
  const Eigen::Index p = truth.gamma.size();
  if (truth.kappa.size() != p || truth.eta.size() != p) {
    throw Error(ErrorCode::DimensionMismatch, "structural parameter lengths differ");
  }

  auto rng = make_rng(spec.seed, 0, StreamRole::Data);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> zunif(-kUniformHalfWidth, kUniformHalfWidth);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Dataset& data = out.data;
  data.kind = outcome_kind(spec.scenario);
  data.pz = p;
  data.W.resize(n, p);
  data.d.resize(n);
  data.y.resize(n);
  out.v.resize(n);
  out.u.resize(n);
  // Row-major draw order keeps a dataset a prefix-stable function of the seed.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      data.W(i, j) = spec.z_dist == ZDist::Normal ? normal(rng) : zunif(rng);
    }
    const double v = normal(rng);
    const double xi = normal(rng);
    const auto w = data.W.row(i);
    const double u = truth.rho_v * v + w.dot(truth.eta) + xi;
    const double d = w.dot(truth.gamma) + v;
    const double a = d * truth.beta + w.dot(truth.kappa) + u;
    data.d[i] = d;
    out.v[i] = v;
    out.u[i] = u;
    if (data.kind == OutcomeKind::Binary) {
      data.y[i] = unit(rng) < outcome_link(spec.scenario, a) ? 1.0 : 0.0;
    } else {
      data.y[i] = outcome_link(spec.scenario, a);
    }
  }
  return out;
}

double true_cate_oracle(Scenario scenario, const StructuralParams& params, const EvalPoint& point,
                        std::int64_t n_mc, std::uint64_t seed) {
  if (n_mc <= 0) throw Error(ErrorCode::InvalidArgument, "n_mc must be positive");
  if (point.w.size() != params.kappa.size()) {
    throw Error(ErrorCode::DimensionMismatch, "evaluation w has the wrong length");
  }
  if (point.d == point.d_prime) return 0.0;

  const double wk = point.w.dot(params.kappa);
  const double we = point.w.dot(params.eta);
  const double a_d = point.d * params.beta + wk;
  const double a_dp = point.d_prime * params.beta + wk;

  auto rng = make_rng(seed, 0, StreamRole::Oracle);
  std::normal_distribution<double> normal(0.0, 1.0);
  double sum = 0.0;
  for (std::int64_t r = 0; r < n_mc; ++r) {
    const double v = normal(rng);
    const double xi = normal(rng);
    const double u = params.rho_v * v + we + xi;
    sum += outcome_link(scenario, a_d + u) - outcome_link(scenario, a_dp + u);
  }
  return sum / static_cast<double>(n_mc);
}

double true_cate_oracle(const ScenarioSpec& spec, const EvalPoint& point, std::int64_t n_mc) {
  return true_cate_oracle(spec.scenario, default_params(spec), point, n_mc, spec.seed);
}

}  // namespace spotiv

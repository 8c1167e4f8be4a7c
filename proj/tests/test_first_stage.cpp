#include "spotiv/dgp.hpp"
#include "spotiv/error.hpp"
#include "spotiv/first_stage.hpp"

#include <doctest.h>

#include <algorithm>

using namespace spotiv;

namespace {

bool contains(const std::vector<Eigen::Index>& s, Eigen::Index j) {
  return std::find(s.begin(), s.end(), j) != s.end();
}

}  // namespace

TEST_CASE("noiseless exposure is recovered exactly") {
  Dataset data = generate(ScenarioSpec{.n = 400}).data;
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(7);
  gamma[0] = 1.0;
  data.d = data.W * gamma;
  const auto fit = fit_first_stage(data);
  CHECK((fit.gamma_hat - gamma).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(fit.v_hat.cwiseAbs().maxCoeff() < 1e-10);
  CHECK(fit.S_hat.size() == 1);
  CHECK(fit.S_hat[0] == 0);
}

TEST_CASE("all seven instruments are selected at c_gamma 0.8") {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto fit = fit_first_stage(generate(ScenarioSpec{.seed = seed}).data);
    hits += fit.S_hat.size() == 7;
  }
  CHECK(hits >= 99);
}

TEST_CASE("an irrelevant instrument is screened out") {
  int excluded = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    ScenarioSpec spec{.n = 2000, .seed = seed};
    auto par = default_params(spec);
    par.gamma[6] = 0.0;
    const auto fit = fit_first_stage(generate(spec, par).data);
    excluded += !contains(fit.S_hat, 6);
  }
  CHECK(excluded >= 95);
}

TEST_CASE("refitting on the fitted exposure reproduces gamma_hat") {
  Dataset data = generate(ScenarioSpec{.n = 500, .seed = 5}).data;
  const auto fit = fit_first_stage(data);
  data.d = data.W * fit.gamma_hat + fit.v_hat;
  const auto refit = fit_first_stage(data);
  CHECK((refit.gamma_hat - fit.gamma_hat).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("scaling d scales the fit and keeps S_hat") {
  Dataset data = generate(ScenarioSpec{.n = 500, .c_gamma = 0.2, .seed = 8}).data;
  const auto fit = fit_first_stage(data);
  for (double c : {-3.0, 0.5, 7.0}) {
    Dataset scaled = data;
    scaled.d *= c;
    const auto sf = fit_first_stage(scaled);
    CHECK((sf.gamma_hat - c * fit.gamma_hat).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((sf.v_hat - c * fit.v_hat).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(sf.sigma_v_hat == doctest::Approx(std::abs(c) * fit.sigma_v_hat).epsilon(1e-12));
    CHECK(sf.S_hat == fit.S_hat);
  }
}

TEST_CASE("inverse Gram diagonal is positive and the square root is consistent") {
  const auto fit = fit_first_stage(generate(ScenarioSpec{.n = 300, .seed = 2}).data);
  CHECK(fit.Sigma_hat_inv.diagonal().minCoeff() > 0.0);
  const Eigen::MatrixXd r = fit.Sigma_hat_inv_sqrt * fit.Sigma_hat * fit.Sigma_hat_inv_sqrt;
  CHECK((r - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(!fit.sigma_floored);
  CHECK(fit.sigma_v_hat * fit.sigma_v_hat ==
        doctest::Approx(fit.v_hat.squaredNorm() / 300.0).epsilon(1e-14));
}

TEST_CASE("threshold constant is a knob") {
  const auto data = generate(ScenarioSpec{.n = 300, .c_gamma = 0.15, .seed = 4}).data;
  const auto loose = fit_first_stage(data, {.threshold_constant = 0.1});
  const auto tight = fit_first_stage(data, {.threshold_constant = 20.0});
  CHECK(loose.S_hat.size() >= tight.S_hat.size());
  for (auto j : tight.S_hat) CHECK(contains(loose.S_hat, j));
  for (Eigen::Index j = 0; j < 7; ++j) {
    CHECK(contains(tight.S_hat, j) ==
          (std::abs(tight.gamma_hat[j]) >= relevance_threshold(tight, j, 300, 20.0)));
  }
}

TEST_CASE("rank-deficient design is rejected") {
  Dataset data = generate(ScenarioSpec{.n = 100}).data;
  data.W.col(3) = data.W.col(2);
  CHECK_THROWS_AS(fit_first_stage(data), Error);
  try {
    fit_first_stage(data);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficientDesign);
  }
}

TEST_CASE("no relevant instrument gives a warning, not an error") {
  Dataset data = generate(ScenarioSpec{.n = 200, .seed = 3}).data;
  data.d = Eigen::VectorXd::LinSpaced(200, -1.0, 1.0).unaryExpr([](double x) {
    return std::sin(37.0 * x);
  });
  const auto fit = fit_first_stage(data, {.threshold_constant = 1e6});
  CHECK(fit.S_hat.empty());
  CHECK(fit.warning.has_value());
}

#include "spotiv/median.hpp"

#include "spotiv/error.hpp"
#include "spotiv/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace spotiv {

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "median of an empty set");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

StructuralFit fit_structural(const Eigen::MatrixXd& Theta_hat, const Eigen::VectorXd& gamma_hat,
                             const std::vector<Eigen::Index>& S_hat) {
  if (S_hat.empty()) {
    throw Error(ErrorCode::NoRelevantInstruments, "no relevant instruments");
  }
  const auto p = Theta_hat.rows();
  const auto M = Theta_hat.cols();
  if (gamma_hat.size() != p) {
    throw Error(ErrorCode::DimensionMismatch, "Theta_hat and gamma_hat differ in length");
  }
  StructuralFit fit;
  fit.S_hat = S_hat;
  fit.ratios.resize(static_cast<Eigen::Index>(S_hat.size()), M);
  fit.b_hat.resize(M);
  fit.B_hat.resize(p + 1, M);
  for (Eigen::Index m = 0; m < M; ++m) {
    std::vector<double> column;
    column.reserve(S_hat.size());
    for (std::size_t r = 0; r < S_hat.size(); ++r) {
      const auto j = S_hat[r];
      const double ratio = Theta_hat(j, m) / gamma_hat[j];
      fit.ratios(static_cast<Eigen::Index>(r), m) = ratio;
      column.push_back(ratio);
    }
    fit.b_hat[m] = median(std::move(column));
    fit.B_hat(0, m) = fit.b_hat[m];
    fit.B_hat.col(m).tail(p) = Theta_hat.col(m) - fit.b_hat[m] * gamma_hat;
  }
  return fit;
}

Eigen::VectorXd logistic_fitted(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int max_iter) {
  const auto n = X.rows();
  const auto k = X.cols();
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd prob(n);
  auto update_prob = [&] {
    prob = ((-(X * coef)).array().exp() + 1.0).inverse().matrix();
  };
  update_prob();
  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::VectorXd weight = (prob.array() * (1.0 - prob.array())).max(1e-12).matrix();
    const Eigen::MatrixXd info = X.transpose() * weight.asDiagonal() * X;
    const Eigen::VectorXd score = X.transpose() * (y - prob);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success) break;
    const Eigen::VectorXd step = ldlt.solve(score);
    if (!step.allFinite()) break;
    coef += step;
    update_prob();
    if (step.cwiseAbs().maxCoeff() < 1e-10 * (1.0 + coef.cwiseAbs().maxCoeff())) break;
  }
  return prob;
}

MajorityTestResult count_votes(const Eigen::VectorXd& theta1, const Eigen::VectorXd& gamma_hat,
                               const std::vector<Eigen::Index>& S_hat,
                               const Eigen::MatrixXd& eps) {
  MajorityTestResult result;
  const double half = static_cast<double>(S_hat.size()) / 2.0;
  Eigen::Index supported = 0;
  for (auto k : S_hat) {
    Eigen::Index votes = 0;
    for (auto j : S_hat) {
      const double b_j = theta1[j] / gamma_hat[j];
      const double threshold = eps(j, k);
      result.thresholds[{j, k}] = threshold;
      // j == k is exactly zero in exact arithmetic; keep it so in floating point too
      const double deviation = j == k ? 0.0 : std::abs(theta1[k] - b_j * gamma_hat[k]);
      if (deviation <= threshold) ++votes;
    }
    result.votes[k] = votes;
    if (static_cast<double>(votes) > half) ++supported;
  }
  result.passed = !(static_cast<double>(supported) <= half);
  return result;
}

MajorityTestResult majority_vote_test(const SirFit& sir, const FirstStageFit& fs,
                                      const Dataset& data, const MajorityTestOptions& options) {
  if (data.kind != OutcomeKind::Binary) {
    throw Error(ErrorCode::InvalidArgument, "the majority vote test needs a binary outcome");
  }
  if (fs.S_hat.empty()) throw Error(ErrorCode::NoRelevantInstruments, "no relevant instruments");

  const auto n = data.n();
  const auto p = data.p();
  const double nn = static_cast<double>(n);

  Eigen::VectorXd p_hat;
  if (options.source == PHatSource::Logistic) {
    Eigen::MatrixXd X(n, p + 2);
    X << Eigen::VectorXd::Ones(n), data.W, fs.v_hat;
    p_hat = logistic_fitted(X, data.y);
  } else {
    Eigen::MatrixXd indices(n, sir.Theta_hat.cols() + 1);
    indices << data.W * sir.Theta_hat, fs.v_hat;
    const BoxNeighborhoods cloud(indices, rule_of_thumb_bandwidths(indices));
    p_hat = box_kernel_regression(cloud, data.y, indices);
  }
  p_hat = p_hat.cwiseMax(options.clamp).cwiseMin(1.0 - options.clamp);

  const Eigen::VectorXd weight = (p_hat.array() * (1.0 - p_hat.array())).matrix();
  Eigen::MatrixXd gram = data.W.transpose() * weight.asDiagonal() * data.W / nn;
  bool ridge = false;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> spectrum(gram, Eigen::EigenvaluesOnly);
  const double lmin = spectrum.eigenvalues().minCoeff();
  const double lmax = spectrum.eigenvalues().maxCoeff();
  if (llt.info() != Eigen::Success || !(lmin > 0.0) || lmax / lmin > 1e12) {
    gram.diagonal().array() += 1e-8 * gram.trace() / static_cast<double>(p);
    llt.compute(gram);
    ridge = true;
  }
  const Eigen::MatrixXd U = llt.solve(Eigen::MatrixXd::Identity(p, p));

  const double log_term =
      std::sqrt(std::log(std::max(static_cast<double>(data.pz), nn)) / nn);
  Eigen::MatrixXd eps = Eigen::MatrixXd::Zero(data.pz, data.pz);
  for (auto j : fs.S_hat) {
    for (auto k : fs.S_hat) {
      const Eigen::VectorXd direction =
          U.col(k) - (fs.gamma_hat[k] / fs.gamma_hat[j]) * U.col(j);
      eps(j, k) = options.threshold_constant * (data.W * direction).norm() / std::sqrt(nn) *
                  log_term;
    }
  }

  MajorityTestResult result = count_votes(sir.Theta_hat.col(0), fs.gamma_hat, fs.S_hat, eps);
  result.p_hat_source = options.source;
  result.ridge_fallback = ridge;
  return result;
}

}  // namespace spotiv

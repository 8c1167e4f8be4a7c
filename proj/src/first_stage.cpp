#include "spotiv/first_stage.hpp"

#include "spotiv/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace spotiv {

double relevance_threshold(const FirstStageFit& fit, Eigen::Index j, Eigen::Index n,
                           double threshold_constant) {
  const double nn = static_cast<double>(n);
  return fit.sigma_v_hat *
         std::sqrt(threshold_constant * fit.Sigma_hat_inv(j, j) * std::log(nn) / nn);
}

FirstStageFit fit_first_stage(const Dataset& data, const FirstStageOptions& options) {
  const auto n = data.n();
  const auto p = data.p();
  const double nn = static_cast<double>(n);

  FirstStageFit fit;
  fit.Sigma_hat = (data.W.transpose() * data.W) / nn;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fit.Sigma_hat);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::RankDeficientDesign, "rank-deficient design: eigensolver failed");
  }
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double lmax = lambda.maxCoeff();
  const double lmin = lambda.minCoeff();
  fit.condition_number = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(lmax > 0.0) || !(fit.condition_number < options.max_condition)) {
    std::ostringstream msg;
    msg << "rank-deficient design: condition number of W'W is " << fit.condition_number;
    throw Error(ErrorCode::RankDeficientDesign, msg.str());
  }

  const Eigen::MatrixXd& U = eig.eigenvectors();
  fit.Sigma_hat_inv = U * lambda.cwiseInverse().asDiagonal() * U.transpose();
  const double floor = 1e-10 * lmax;
  Eigen::VectorXd floored = lambda;
  for (Eigen::Index k = 0; k < p; ++k) {
    if (floored[k] < floor) {
      floored[k] = floor;
      fit.sigma_floored = true;
    }
  }
  fit.Sigma_hat_inv_sqrt = U * floored.cwiseSqrt().cwiseInverse().asDiagonal() * U.transpose();

  fit.gamma_hat = data.W.colPivHouseholderQr().solve(data.d);
  fit.v_hat = data.d - data.W * fit.gamma_hat;
  fit.sigma_v_hat = std::sqrt(fit.v_hat.squaredNorm() / nn);

  for (Eigen::Index j = 0; j < data.pz; ++j) {
    if (std::abs(fit.gamma_hat[j]) >=
        relevance_threshold(fit, j, n, options.threshold_constant)) {
      fit.S_hat.push_back(j);
    }
  }
  if (fit.S_hat.empty()) fit.warning = "no relevant instruments selected";
  return fit;
}

}  // namespace spotiv

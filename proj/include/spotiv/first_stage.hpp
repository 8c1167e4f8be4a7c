#pragma once

#include "spotiv/data_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spotiv {

struct FirstStageOptions {
  /// Constant inside the square root of the relevance threshold.
  double threshold_constant = 2.0;
  /// Largest accepted condition number of W'W.
  double max_condition = 1e12;
};

/// Least-squares fit of d on W, its residuals and the selected relevant set.
struct FirstStageFit {
  Eigen::VectorXd gamma_hat;
  Eigen::VectorXd v_hat;
  double sigma_v_hat = 0.0;
  Eigen::MatrixXd Sigma_hat;
  Eigen::MatrixXd Sigma_hat_inv;
  /// Symmetric Sigma_hat^{-1/2}, eigenvalues floored at 1e-10 * lambda_max.
  Eigen::MatrixXd Sigma_hat_inv_sqrt;
  bool sigma_floored = false;
  double condition_number = 0.0;
  /// Zero-based column indices into W, all below pz.
  std::vector<Eigen::Index> S_hat;
  std::optional<std::string> warning;
};

FirstStageFit fit_first_stage(const Dataset& data, const FirstStageOptions& options = {});

/// Threshold |gamma_j| must reach for instrument j to be declared relevant.
double relevance_threshold(const FirstStageFit& fit, Eigen::Index j, Eigen::Index n,
                           double threshold_constant = 2.0);

}  // namespace spotiv

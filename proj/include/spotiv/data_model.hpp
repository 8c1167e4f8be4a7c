#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>

namespace spotiv {

enum class OutcomeKind { Binary, Continuous };

std::string_view to_string(OutcomeKind kind) noexcept;

/// Observed sample: outcome y, exposure d and covariates W = (z | x).
/// The first `pz` columns of W are the candidate instruments.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::VectorXd d;
  Eigen::MatrixXd W;
  Eigen::Index pz = 0;
  OutcomeKind kind = OutcomeKind::Binary;

  Eigen::Index n() const { return W.rows(); }
  Eigen::Index p() const { return W.cols(); }
  Eigen::Index px() const { return W.cols() - pz; }

  auto instruments() const { return W.leftCols(pz); }
  auto covariates() const { return W.rightCols(W.cols() - pz); }
};

/// Checks every Dataset invariant and returns the dataset unchanged.
/// Throws spotiv::Error with a distinct code per violated invariant.
Dataset validate(Dataset data);

/// Reassemble W from its instrument and covariate blocks.
Eigen::MatrixXd join_columns(const Eigen::MatrixXd& z, const Eigen::MatrixXd& x);

/// Subtract column means from y (continuous only), d and W. Opt-in; the
/// estimators themselves never center.
Dataset center(Dataset data);

/// Ground-truth parameters of a simulated design (p_eta = 1).
struct StructuralParams {
  double beta = 0.0;
  Eigen::VectorXd kappa;
  Eigen::VectorXd eta;
  Eigen::VectorXd gamma;
  double rho_v = 0.25;
};

/// Evaluation point for CATE(d, d' | w).
struct EvalPoint {
  double d = 0.0;
  double d_prime = 0.0;
  Eigen::VectorXd w;
};

/// d = -1, d' = 2, w = (0, ..., 0, 0.1) in R^p.
EvalPoint default_eval_point(Eigen::Index p = 7);

}  // namespace spotiv

#pragma once

#include "spotiv/data_model.hpp"
#include "spotiv/first_stage.hpp"

#include <vector>

namespace spotiv {

struct SirOptions {
  /// Exponent of the n^{c0} rank penalty, 0 < c0 < 1.
  double c0 = 0.5;
  /// Slices for continuous outcomes.
  Eigen::Index n_slices = 10;
};

/// Side information of an Omega estimate.
struct OmegaAux {
  /// Observations per class (binary) or per slice (continuous).
  std::vector<Eigen::Index> counts;
  /// Class means alpha(0), alpha(1), or slice means, as columns.
  Eigen::MatrixXd means;
};

struct OmegaEstimate {
  Eigen::MatrixXd Omega;
  OmegaAux aux;
};

struct SirFit {
  Eigen::MatrixXd Omega_hat;
  /// Descending.
  Eigen::VectorXd eigenvalues;
  /// Columns match `eigenvalues`.
  Eigen::MatrixXd eigenvectors;
  Eigen::Index M_hat = 1;
  /// First M_hat eigenvectors, each signed so its largest-magnitude entry is positive.
  Eigen::MatrixXd Theta_hat;
  double c0 = 0.5;
};

/// P(y=1) P(y=0) (alpha(1) - alpha(0)) (alpha(1) - alpha(0))'.
OmegaEstimate estimate_omega_binary(const Dataset& data, const Eigen::MatrixXd& Sigma_inv_sqrt);

/// Slice-mean covariance of the standardized, globally centered covariates.
OmegaEstimate estimate_omega_continuous(const Dataset& data, const Eigen::MatrixXd& Sigma_inv_sqrt,
                                        Eigen::Index n_slices);

/// Sizes of `n_slices` contiguous slices of n sorted observations.
std::vector<Eigen::Index> slice_sizes(Eigen::Index n, Eigen::Index n_slices);

/// BIC-type criterion C(m), m = 1..p (entry m-1 of the result).
Eigen::VectorXd rank_criterion(const Eigen::VectorXd& eigenvalues, Eigen::Index n, Eigen::Index p,
                               double c0);

/// argmax_m C(m), ties broken toward the smaller m.
Eigen::Index select_rank(const Eigen::VectorXd& eigenvalues, Eigen::Index n, Eigen::Index p,
                         double c0);

SirFit fit_sir(const Dataset& data, const FirstStageFit& first_stage, const SirOptions& options = {});

}  // namespace spotiv

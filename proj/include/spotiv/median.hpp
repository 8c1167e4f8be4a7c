#pragma once

#include "spotiv/data_model.hpp"
#include "spotiv/first_stage.hpp"
#include "spotiv/sir.hpp"

#include <map>
#include <utility>
#include <vector>

namespace spotiv {

/// B_hat = [b_hat ; Theta_hat - gamma_hat b_hat'] with b_hat the column-wise
/// median of the ratios Theta_hat(j, m) / gamma_hat(j) over j in S_hat.
struct StructuralFit {
  Eigen::VectorXd b_hat;
  /// (p + 1) x M_hat.
  Eigen::MatrixXd B_hat;
  /// |S_hat| x M_hat, rows ordered as S_hat.
  Eigen::MatrixXd ratios;
  std::vector<Eigen::Index> S_hat;
};

/// Median; an even count yields the midpoint of the central pair.
double median(std::vector<double> values);

StructuralFit fit_structural(const Eigen::MatrixXd& Theta_hat, const Eigen::VectorXd& gamma_hat,
                             const std::vector<Eigen::Index>& S_hat);

inline StructuralFit fit_structural(const SirFit& sir, const FirstStageFit& fs) {
  return fit_structural(sir.Theta_hat, fs.gamma_hat, fs.S_hat);
}

enum class PHatSource { Logistic, Kernel };

struct MajorityTestOptions {
  PHatSource source = PHatSource::Logistic;
  /// p_hat is clamped into [clamp, 1 - clamp] before weighting.
  double clamp = 0.01;
  double threshold_constant = 2.01;
};

struct MajorityTestResult {
  /// Votes C_k keyed by zero-based instrument index k in S_hat.
  std::map<Eigen::Index, Eigen::Index> votes;
  /// eps_n^{(j,k)} keyed by (j, k).
  std::map<std::pair<Eigen::Index, Eigen::Index>, double> thresholds;
  bool passed = false;
  PHatSource p_hat_source = PHatSource::Logistic;
  /// The weighted Gram matrix needed the ridge fallback.
  bool ridge_fallback = false;
};

/// Logistic regression of y on (1, W, v_hat), fitted by Newton-Raphson.
/// Returns the fitted probabilities.
Eigen::VectorXd logistic_fitted(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                int max_iter = 50);

/// Voting check of the majority rule from the first column of Theta_hat.
/// Requires a binary outcome and a non-empty S_hat.
MajorityTestResult majority_vote_test(const SirFit& sir, const FirstStageFit& fs,
                                      const Dataset& data,
                                      const MajorityTestOptions& options = {});

/// Vote counting from precomputed thresholds eps(j, k) (dense p_z x p_z,
/// only S_hat entries read). Exposed for direct testing of the rule.
MajorityTestResult count_votes(const Eigen::VectorXd& theta1, const Eigen::VectorXd& gamma_hat,
                               const std::vector<Eigen::Index>& S_hat,
                               const Eigen::MatrixXd& eps);

}  // namespace spotiv

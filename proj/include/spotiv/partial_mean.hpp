#pragma once

#include "spotiv/data_model.hpp"
#include "spotiv/first_stage.hpp"
#include "spotiv/kernel.hpp"
#include "spotiv/median.hpp"

#include <utility>

namespace spotiv {

/// Sample indices t_j = ((d_j, w_j') B_hat, v_hat_j), one row per observation.
Eigen::MatrixXd sample_indices(const Dataset& data, const StructuralFit& fit,
                               const Eigen::VectorXd& v_hat);

/// Rule-of-thumb bandwidths on the sample indices, or `fixed` when non-empty.
/// A single fixed value is broadcast to every dimension.
KernelConfig make_kernel_config(const Eigen::MatrixXd& indices, const Eigen::VectorXd& fixed = {});

struct PhiEstimate {
  double phi = 0.0;
  /// a_j = (1/n) sum_i K(s_i, t_j) / sum_l K(s_i, t_l) over retained i;
  /// sums to retained / n.
  Eigen::VectorXd weights;
  Eigen::Index dropped = 0;
  Eigen::Index retained = 0;
};

/// Partial mean phi_hat(d, w): the average over retained i of the kernel
/// regression g_hat at s_i = ((d, w') B_hat, v_hat_i).
PhiEstimate estimate_phi(double d, const Eigen::VectorXd& w, const StructuralFit& fit,
                         const FirstStageFit& fs, const Dataset& data, const KernelConfig& H);

struct CateResult {
  double phi_d = 0.0;
  double phi_dprime = 0.0;
  double cate = 0.0;
  double plug_in_se = 0.0;
  double boot_se = 0.0;
  std::pair<double, double> ci{0.0, 0.0};
  Eigen::Index n_boot = 0;
  Eigen::Index dropped_points = 0;
  Eigen::VectorXd weights_a;
  Eigen::VectorXd weights_c;
  Eigen::VectorXd bandwidths;
};

/// CATE(d, d' | w) = phi_hat(d, w) - phi_hat(d', w). With `plug_in` the
/// kernel-based standard error is computed as well (one extra smoothing pass).
CateResult estimate_cate(const EvalPoint& point, const StructuralFit& fit, const FirstStageFit& fs,
                         const Dataset& data, const KernelConfig& H, bool plug_in = true);

}  // namespace spotiv

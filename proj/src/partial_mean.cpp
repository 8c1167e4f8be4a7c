#include "spotiv/partial_mean.hpp"

#include "spotiv/error.hpp"

#include <cmath>
#include <string>

namespace spotiv {

namespace {

Eigen::VectorXd evaluation_index(double d, const Eigen::VectorXd& w, const StructuralFit& fit) {
  const auto p = fit.B_hat.rows() - 1;
  if (w.size() != p) {
    throw Error(ErrorCode::DimensionMismatch, "evaluation w has length " +
                                                  std::to_string(w.size()) + ", expected " +
                                                  std::to_string(p));
  }
  return (d * fit.B_hat.row(0) + w.transpose() * fit.B_hat.bottomRows(p)).transpose();
}

}  // namespace

Eigen::MatrixXd sample_indices(const Dataset& data, const StructuralFit& fit,
                               const Eigen::VectorXd& v_hat) {
  const auto n = data.n();
  const auto p = data.p();
  const auto M = fit.B_hat.cols();
  Eigen::MatrixXd t(n, M + 1);
  t.leftCols(M) = data.d * fit.B_hat.row(0) + data.W * fit.B_hat.bottomRows(p);
  t.col(M) = v_hat;
  return t;
}

KernelConfig make_kernel_config(const Eigen::MatrixXd& indices, const Eigen::VectorXd& fixed) {
  KernelConfig H;
  if (fixed.size() == 0) {
    H.rule = BandwidthRule::RuleOfThumb;
    H.bandwidths = rule_of_thumb_bandwidths(indices, H.rot_constant);
    return H;
  }
  H.rule = BandwidthRule::Fixed;
  if (fixed.size() == 1) {
    H.bandwidths = Eigen::VectorXd::Constant(indices.cols(), fixed[0]);
  } else if (fixed.size() == indices.cols()) {
    H.bandwidths = fixed;
  } else {
    throw Error(ErrorCode::InvalidArgument,
                "expected 1 or " + std::to_string(indices.cols()) + " bandwidths, got " +
                    std::to_string(fixed.size()));
  }
  for (Eigen::Index l = 0; l < H.bandwidths.size(); ++l) {
    if (!(H.bandwidths[l] > 0.0)) throw Error(ErrorCode::InvalidArgument, "bandwidths must be positive");
  }
  return H;
}

PhiEstimate estimate_phi(double d, const Eigen::VectorXd& w, const StructuralFit& fit,
                         const FirstStageFit& fs, const Dataset& data, const KernelConfig& H) {
  const auto n = data.n();
  const auto M = fit.B_hat.cols();
  const Eigen::VectorXd center = evaluation_index(d, w, fit);
  const BoxNeighborhoods cloud(sample_indices(data, fit, fs.v_hat), H.bandwidths);

  PhiEstimate out;
  out.weights = Eigen::VectorXd::Zero(n);
  const double nn = static_cast<double>(n);
  Eigen::VectorXd s(M + 1);
  s.head(M) = center;
  std::vector<Eigen::Index> members;
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    s[M] = fs.v_hat[i];
    members.clear();
    double numerator = 0.0;
    cloud.for_each(s, [&](Eigen::Index j) {
      members.push_back(j);
      numerator += data.y[j];
    });
    if (members.empty()) {
      ++out.dropped;
      continue;
    }
    const double count = static_cast<double>(members.size());
    total += numerator / count;
    const double share = 1.0 / (nn * count);
    for (auto j : members) out.weights[j] += share;
  }
  out.retained = n - out.dropped;
  if (out.retained == 0) {
    throw Error(ErrorCode::EmptyNeighborhood, "bandwidth too small at evaluation point");
  }
  out.phi = total / static_cast<double>(out.retained);
  return out;
}

CateResult estimate_cate(const EvalPoint& point, const StructuralFit& fit, const FirstStageFit& fs,
                         const Dataset& data, const KernelConfig& H, bool plug_in) {
  const PhiEstimate at_d = estimate_phi(point.d, point.w, fit, fs, data, H);
  const PhiEstimate at_dp = estimate_phi(point.d_prime, point.w, fit, fs, data, H);

  CateResult result;
  result.phi_d = at_d.phi;
  result.phi_dprime = at_dp.phi;
  result.cate = at_d.phi - at_dp.phi;
  result.dropped_points = at_d.dropped + at_dp.dropped;
  result.weights_a = at_d.weights;
  result.weights_c = at_d.weights - at_dp.weights;
  result.bandwidths = H.bandwidths;
  if (!plug_in) return result;

  // phi_hat = sum_j (n / retained) a_j y_j, so the contrast weights are rescaled
  // by the retained fraction before entering the variance.
  const double nn = static_cast<double>(data.n());
  const Eigen::VectorXd c = at_d.weights * (nn / static_cast<double>(at_d.retained)) -
                            at_dp.weights * (nn / static_cast<double>(at_dp.retained));
  const Eigen::MatrixXd t = sample_indices(data, fit, fs.v_hat);
  const BoxNeighborhoods cloud(t, H.bandwidths);
  const Eigen::VectorXd g_at_t = box_kernel_regression(cloud, data.y, t);
  double variance = 0.0;
  for (Eigen::Index j = 0; j < data.n(); ++j) {
    if (c[j] == 0.0) continue;
    const double g = g_at_t[j];
    const double noise = data.kind == OutcomeKind::Binary ? g * (1.0 - g)
                                                          : (data.y[j] - g) * (data.y[j] - g);
    variance += c[j] * c[j] * noise;
  }
  result.plug_in_se = std::sqrt(variance);
  return result;
}

}  // namespace spotiv

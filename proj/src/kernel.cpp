#include "spotiv/kernel.hpp"

#include "spotiv/error.hpp"

#include <limits>

namespace spotiv {

double kernel_weight(const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b, const Eigen::VectorXd& h) {
  if (a.size() != b.size() || a.size() != h.size()) {
    throw Error(ErrorCode::DimensionMismatch, "kernel arguments differ in length");
  }
  double k = 1.0;
  for (Eigen::Index l = 0; l < h.size(); ++l) k *= box_kernel((a[l] - b[l]) / h[l]) / h[l];
  return k;
}

double quantile_type7(std::vector<double> values, double prob) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = prob * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Eigen::VectorXd rule_of_thumb_bandwidths(const Eigen::MatrixXd& indices, double constant) {
  const auto n = indices.rows();
  const auto dims = indices.cols();
  if (n < 2 || dims < 1) throw Error(ErrorCode::InvalidArgument, "too few points for a bandwidth");
  const double rate =
      std::pow(static_cast<double>(n), -1.0 / (5.0 + static_cast<double>(dims - 1)));
  Eigen::VectorXd h(dims);
  for (Eigen::Index k = 0; k < dims; ++k) {
    const auto col = indices.col(k);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n - 1));
    std::vector<double> values(col.data(), col.data() + n);
    const double iqr = quantile_type7(values, 0.75) - quantile_type7(std::move(values), 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd;
    if (!(spread > 0.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "index " + std::to_string(k) + " is constant; no rule-of-thumb bandwidth");
    }
    h[k] = constant * spread * rate;
  }
  return h;
}

BoxNeighborhoods::BoxNeighborhoods(Eigen::MatrixXd points, Eigen::VectorXd bandwidths)
    : points_(std::move(points)), bandwidths_(std::move(bandwidths)) {
  if (points_.cols() != bandwidths_.size() || points_.cols() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "bandwidth count must equal index dimension");
  }
  for (Eigen::Index l = 0; l < bandwidths_.size(); ++l) {
    if (!(bandwidths_[l] > 0.0) || !std::isfinite(bandwidths_[l])) {
      throw Error(ErrorCode::InvalidArgument, "bandwidths must be positive and finite");
    }
    height_ /= bandwidths_[l];
  }
  last_ = points_.cols() - 1;
  order_.resize(static_cast<std::size_t>(points_.rows()));
  std::iota(order_.begin(), order_.end(), Eigen::Index{0});
  std::stable_sort(order_.begin(), order_.end(), [&](Eigen::Index a, Eigen::Index b) {
    return points_(a, last_) < points_(b, last_);
  });
  keys_.reserve(order_.size());
  for (auto j : order_) keys_.push_back(points_(j, last_));
}

Eigen::VectorXd box_kernel_regression(const BoxNeighborhoods& cloud, const Eigen::VectorXd& y,
                                      const Eigen::MatrixXd& queries) {
  Eigen::VectorXd out(queries.rows());
  for (Eigen::Index i = 0; i < queries.rows(); ++i) {
    double sum = 0.0;
    Eigen::Index count = 0;
    cloud.for_each(queries.row(i).transpose(), [&](Eigen::Index j) {
      sum += y[j];
      ++count;
    });
    out[i] = count > 0 ? sum / static_cast<double>(count)
                       : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace spotiv

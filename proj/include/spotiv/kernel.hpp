#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace spotiv {

enum class BandwidthRule { RuleOfThumb, Fixed };

inline constexpr double kRuleOfThumbConstant = 0.9;

/// Per-dimension bandwidths of the product box kernel.
struct KernelConfig {
  Eigen::VectorXd bandwidths;
  BandwidthRule rule = BandwidthRule::RuleOfThumb;
  double rot_constant = kRuleOfThumbConstant;
};

/// k(x) = 1(|x| <= 1/2).
inline double box_kernel(double x) noexcept { return std::abs(x) <= 0.5 ? 1.0 : 0.0; }

/// K_H(a, b) = prod_l k((a_l - b_l) / h_l) / h_l.
double kernel_weight(const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b, const Eigen::VectorXd& h);

/// Sample quantile, linear interpolation between order statistics (R type 7).
double quantile_type7(std::vector<double> values, double prob);

/// h_k = c * min(sd_k, IQR_k / 1.34) * n^{-1/(5 + M)} for each column of the
/// index matrix; M is the number of estimated directions (columns - 1).
Eigen::VectorXd rule_of_thumb_bandwidths(const Eigen::MatrixXd& indices,
                                         double constant = kRuleOfThumbConstant);

/// Product box-kernel neighborhoods over a fixed point cloud. Points are
/// sorted on their last coordinate so a query only scans the slab that can
/// fall inside the box; membership is then decided by the exact kernel test.
class BoxNeighborhoods {
 public:
  BoxNeighborhoods(Eigen::MatrixXd points, Eigen::VectorXd bandwidths);

  /// Calls visit(j) for each point j with K_H(query, t_j) > 0, in ascending
  /// order of the sort key.
  template <typename Visit>
  void for_each(const Eigen::Ref<const Eigen::VectorXd>& query, Visit&& visit) const {
    const double q = query[last_];
    const double reach = 0.5 * bandwidths_[last_] * (1.0 + 1e-9);
    auto lo = std::lower_bound(keys_.begin(), keys_.end(), q - reach);
    auto hi = std::upper_bound(lo, keys_.end(), q + reach);
    for (auto it = lo; it != hi; ++it) {
      const Eigen::Index j = order_[static_cast<std::size_t>(it - keys_.begin())];
      if (inside(query, j)) visit(j);
    }
  }

  /// Product of 1/h_l: the kernel value of every in-box point.
  double height() const noexcept { return height_; }
  Eigen::Index size() const noexcept { return points_.rows(); }
  const Eigen::VectorXd& bandwidths() const noexcept { return bandwidths_; }

 private:
  bool inside(const Eigen::Ref<const Eigen::VectorXd>& query, Eigen::Index j) const {
    for (Eigen::Index l = 0; l < points_.cols(); ++l) {
      if (!(std::abs((query[l] - points_(j, l)) / bandwidths_[l]) <= 0.5)) return false;
    }
    return true;
  }

  Eigen::MatrixXd points_;
  Eigen::VectorXd bandwidths_;
  Eigen::Index last_ = 0;
  std::vector<Eigen::Index> order_;
  std::vector<double> keys_;
  double height_ = 1.0;
};

/// Nadaraya-Watson box-kernel regression of y at each row of `queries`.
/// Entries with an empty neighborhood are NaN.
Eigen::VectorXd box_kernel_regression(const BoxNeighborhoods& cloud, const Eigen::VectorXd& y,
                                      const Eigen::MatrixXd& queries);

}  // namespace spotiv

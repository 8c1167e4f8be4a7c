#include "spotiv/sir.hpp"

#include "spotiv/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace spotiv {

OmegaEstimate estimate_omega_binary(const Dataset& data, const Eigen::MatrixXd& Sigma_inv_sqrt) {
  const auto n = data.n();
  const auto p = data.p();
  Eigen::VectorXd sum0 = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd sum1 = Eigen::VectorXd::Zero(p);
  Eigen::Index n1 = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (data.y[i] == 1.0) {
      sum1 += data.W.row(i).transpose();
      ++n1;
    } else {
      sum0 += data.W.row(i).transpose();
    }
  }
  const Eigen::Index n0 = n - n1;
  if (n0 == 0 || n1 == 0) {
    throw Error(ErrorCode::EmptyClass, "outcome class with zero count");
  }
  OmegaEstimate out;
  out.aux.counts = {n0, n1};
  out.aux.means.resize(p, 2);
  out.aux.means.col(0) = Sigma_inv_sqrt * (sum0 / static_cast<double>(n0));
  out.aux.means.col(1) = Sigma_inv_sqrt * (sum1 / static_cast<double>(n1));
  const double p1 = static_cast<double>(n1) / static_cast<double>(n);
  const double p0 = 1.0 - p1;
  const Eigen::VectorXd diff = out.aux.means.col(1) - out.aux.means.col(0);
  out.Omega = p1 * p0 * diff * diff.transpose();
  return out;
}

std::vector<Eigen::Index> slice_sizes(Eigen::Index n, Eigen::Index n_slices) {
  if (n_slices < 1) throw Error(ErrorCode::InvalidArgument, "n_slices must be positive");
  std::vector<Eigen::Index> sizes(static_cast<std::size_t>(n_slices), n / n_slices);
  for (Eigen::Index h = 0; h < n % n_slices; ++h) ++sizes[static_cast<std::size_t>(h)];
  return sizes;
}

OmegaEstimate estimate_omega_continuous(const Dataset& data, const Eigen::MatrixXd& Sigma_inv_sqrt,
                                        Eigen::Index n_slices) {
  if (n_slices < 2) throw Error(ErrorCode::InvalidArgument, "n_slices must be at least 2");
  const auto n = data.n();
  const auto p = data.p();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return data.y[a] < data.y[b]; });
  Eigen::Index distinct = n > 0 ? 1 : 0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    distinct += data.y[order[k]] != data.y[order[k - 1]];
  }
  if (distinct < n_slices) {
    throw Error(ErrorCode::DegenerateSlicing,
                "degenerate slicing: " + std::to_string(distinct) + " distinct outcome values for " +
                    std::to_string(n_slices) + " slices");
  }

  Eigen::MatrixXd Zs = data.W * Sigma_inv_sqrt;  // Sigma_inv_sqrt is symmetric
  Zs.rowwise() -= Zs.colwise().mean();

  OmegaEstimate out;
  out.aux.counts = slice_sizes(n, n_slices);
  out.aux.means = Eigen::MatrixXd::Zero(p, n_slices);
  out.Omega = Eigen::MatrixXd::Zero(p, p);
  std::size_t pos = 0;
  for (Eigen::Index h = 0; h < n_slices; ++h) {
    const auto size = out.aux.counts[static_cast<std::size_t>(h)];
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
    for (Eigen::Index k = 0; k < size; ++k, ++pos) mean += Zs.row(order[pos]).transpose();
    mean /= static_cast<double>(size);
    out.aux.means.col(h) = mean;
    out.Omega += (static_cast<double>(size) / static_cast<double>(n)) * mean * mean.transpose();
  }
  return out;
}

Eigen::VectorXd rank_criterion(const Eigen::VectorXd& eigenvalues, Eigen::Index n, Eigen::Index p,
                               double c0) {
  const double nn = static_cast<double>(n);
  const double penalty = std::pow(nn, c0);
  Eigen::VectorXd C(p);
  for (Eigen::Index m = 1; m <= p; ++m) {
    double tail = 0.0;
    for (Eigen::Index i = m; i < p && i < eigenvalues.size(); ++i) {
      const double l = eigenvalues[i];
      if (l > 0.0) tail += std::log1p(l) - l;
    }
    const double dm = static_cast<double>(m);
    const double dp = static_cast<double>(p);
    C[m - 1] = nn / 2.0 * tail - penalty * dm * (2.0 * dp - dm + 1.0) / 2.0;
  }
  return C;
}

Eigen::Index select_rank(const Eigen::VectorXd& eigenvalues, Eigen::Index n, Eigen::Index p,
                         double c0) {
  if (!(c0 > 0.0 && c0 < 1.0)) throw Error(ErrorCode::InvalidArgument, "c0 must lie in (0, 1)");
  const Eigen::VectorXd C = rank_criterion(eigenvalues, n, p, c0);
  Eigen::Index best = 0;
  for (Eigen::Index m = 1; m < p; ++m) {
    if (C[m] > C[best]) best = m;
  }
  return best + 1;
}

SirFit fit_sir(const Dataset& data, const FirstStageFit& first_stage, const SirOptions& options) {
  const OmegaEstimate omega =
      data.kind == OutcomeKind::Binary
          ? estimate_omega_binary(data, first_stage.Sigma_hat_inv_sqrt)
          : estimate_omega_continuous(data, first_stage.Sigma_hat_inv_sqrt, options.n_slices);
  const auto p = data.p();

  SirFit fit;
  fit.c0 = options.c0;
  fit.Omega_hat = omega.Omega;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fit.Omega_hat);
  fit.eigenvalues = eig.eigenvalues().reverse();
  fit.eigenvectors = eig.eigenvectors().rowwise().reverse();
  for (Eigen::Index k = 0; k < p; ++k) {
    auto col = fit.eigenvectors.col(k);
    Eigen::Index arg = 0;
    col.cwiseAbs().maxCoeff(&arg);
    if (col[arg] < 0.0) col = -col;
  }
  fit.M_hat = select_rank(fit.eigenvalues, data.n(), p, options.c0);
  fit.Theta_hat = fit.eigenvectors.leftCols(fit.M_hat);
  return fit;
}

}  // namespace spotiv

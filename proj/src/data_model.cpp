#include "spotiv/data_model.hpp"

#include "spotiv/error.hpp"

#include <string>

namespace spotiv {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::SampleTooSmall: return "sample_too_small";
    case ErrorCode::OutcomeNotBinary: return "outcome_not_binary";
    case ErrorCode::SingleClassOutcome: return "single_class_outcome";
    case ErrorCode::NonFinite: return "non_finite";
    case ErrorCode::RankDeficientDesign: return "rank_deficient_design";
    case ErrorCode::EmptyClass: return "empty_class";
    case ErrorCode::DegenerateSlicing: return "degenerate_slicing";
    case ErrorCode::NoRelevantInstruments: return "no_relevant_instruments";
    case ErrorCode::EmptyNeighborhood: return "empty_neighborhood";
    case ErrorCode::BootstrapExhausted: return "bootstrap_exhausted";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Parse: return "parse";
  }
  return "unknown";
}

std::string_view to_string(OutcomeKind kind) noexcept {
  return kind == OutcomeKind::Binary ? "binary" : "continuous";
}

Dataset validate(Dataset data) {
  const auto n = data.W.rows();
  const auto p = data.W.cols();
  if (data.y.size() != n || data.d.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "dimension mismatch: y has " + std::to_string(data.y.size()) + ", d has " +
                    std::to_string(data.d.size()) + ", W has " + std::to_string(n) + " rows");
  }
  if (data.pz < 0 || data.pz > p) {
    throw Error(ErrorCode::DimensionMismatch,
                "dimension mismatch: pz = " + std::to_string(data.pz) + " with p = " +
                    std::to_string(p));
  }
  if (n < p + 2) {
    throw Error(ErrorCode::SampleTooSmall, "n too small: n = " + std::to_string(n) +
                                               " but p + 2 = " + std::to_string(p + 2));
  }
  if (!data.y.allFinite() || !data.d.allFinite() || !data.W.allFinite()) {
    throw Error(ErrorCode::NonFinite, "non-finite value in sample");
  }
  if (data.kind == OutcomeKind::Binary) {
    Eigen::Index ones = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = data.y[i];
      if (v != 0.0 && v != 1.0) {
        throw Error(ErrorCode::OutcomeNotBinary,
                    "outcome not in {0,1} at row " + std::to_string(i));
      }
      ones += v == 1.0;
    }
    if (ones == 0 || ones == n) {
      throw Error(ErrorCode::SingleClassOutcome, "outcome has a single class");
    }
  }
  return data;
}

Eigen::MatrixXd join_columns(const Eigen::MatrixXd& z, const Eigen::MatrixXd& x) {
  if (x.cols() > 0 && z.rows() != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "dimension mismatch joining z and x");
  }
  Eigen::MatrixXd W(z.rows(), z.cols() + x.cols());
  W << z, x;
  return W;
}

Dataset center(Dataset data) {
  if (data.kind == OutcomeKind::Continuous) {
    data.y.array() -= data.y.mean();
  }
  data.d.array() -= data.d.mean();
  data.W.rowwise() -= data.W.colwise().mean();
  return data;
}

EvalPoint default_eval_point(Eigen::Index p) {
  EvalPoint point;
  point.d = -1.0;
  point.d_prime = 2.0;
  point.w = Eigen::VectorXd::Zero(p);
  point.w[p - 1] = 0.1;
  return point;
}

}  // namespace spotiv

#include "spotiv/data_model.hpp"
#include "spotiv/error.hpp"

#include <doctest.h>

#include <string>

using namespace spotiv;

namespace {

Dataset small_binary() {
  Dataset data;
  data.W.resize(6, 2);
  data.W << 0.1, -0.2, 0.5, 1.0, -1.2, 0.3, 0.7, -0.4, 0.0, 0.9, -0.6, -1.1;
  data.d = Eigen::VectorXd::LinSpaced(6, -1.0, 1.5);
  data.y.resize(6);
  data.y << 0, 1, 1, 0, 1, 0;
  data.pz = 1;
  data.kind = OutcomeKind::Binary;
  return data;
}

ErrorCode code_of(const Dataset& data) {
  try {
    validate(data);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected validate to throw");
  return ErrorCode::Parse;
}

std::string message_of(const Dataset& data) {
  try {
    validate(data);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("well-formed sample passes through unchanged") {
  const Dataset data = small_binary();
  const Dataset out = validate(data);
  CHECK(out.y == data.y);
  CHECK(out.d == data.d);
  CHECK(out.W == data.W);
  CHECK(out.pz == 1);
  CHECK(out.px() == 1);
}

TEST_CASE("validate is idempotent") {
  const Dataset once = validate(small_binary());
  const Dataset twice = validate(once);
  CHECK(twice.W == once.W);
  CHECK(twice.y == once.y);
  CHECK(twice.d == once.d);
}

TEST_CASE("binary outcome outside {0,1} is rejected") {
  Dataset data = small_binary();
  data.y[2] = 2.0;
  CHECK(code_of(data) == ErrorCode::OutcomeNotBinary);
  CHECK(message_of(data).find("outcome not in {0,1}") != std::string::npos);
}

TEST_CASE("n below p + 2 is rejected") {
  Dataset data;
  data.W = Eigen::MatrixXd::Random(5, 7);
  data.d = Eigen::VectorXd::Random(5);
  data.y = Eigen::VectorXd::Zero(5);
  data.y[0] = 1;
  data.pz = 7;
  CHECK(code_of(data) == ErrorCode::SampleTooSmall);
  CHECK(message_of(data).find("n too small") != std::string::npos);
}

TEST_CASE("other invariants have their own codes") {
  Dataset bad_len = small_binary();
  bad_len.d.conservativeResize(5);
  CHECK(code_of(bad_len) == ErrorCode::DimensionMismatch);

  Dataset bad_pz = small_binary();
  bad_pz.pz = 3;
  CHECK(code_of(bad_pz) == ErrorCode::DimensionMismatch);

  Dataset nan = small_binary();
  nan.W(1, 1) = std::nan("");
  CHECK(code_of(nan) == ErrorCode::NonFinite);

  Dataset one_class = small_binary();
  one_class.y.setOnes();
  CHECK(code_of(one_class) == ErrorCode::SingleClassOutcome);

  Dataset cont = small_binary();
  cont.kind = OutcomeKind::Continuous;
  cont.y[0] = 3.7;
  CHECK_NOTHROW(validate(cont));
}

TEST_CASE("instrument and covariate blocks reassemble W bit-exactly") {
  const Eigen::MatrixXd W = Eigen::MatrixXd::Random(20, 5);
  Dataset data;
  data.W = W;
  data.pz = 3;
  const Eigen::MatrixXd z = data.instruments();
  const Eigen::MatrixXd x = data.covariates();
  CHECK(z.cols() == 3);
  CHECK(x.cols() == 2);
  CHECK(join_columns(z, x) == W);
  CHECK(join_columns(W, Eigen::MatrixXd(20, 0)) == W);
}

TEST_CASE("centering leaves binary y alone") {
  Dataset data = small_binary();
  const Dataset c = center(data);
  CHECK(c.y == data.y);
  CHECK(std::abs(c.d.mean()) < 1e-15);
  CHECK(c.W.colwise().mean().cwiseAbs().maxCoeff() < 1e-15);
  data.kind = OutcomeKind::Continuous;
  CHECK(std::abs(center(data).y.mean()) < 1e-15);
}

TEST_CASE("default evaluation point") {
  const EvalPoint point = default_eval_point();
  CHECK(point.d == -1.0);
  CHECK(point.d_prime == 2.0);
  CHECK(point.w.size() == 7);
  CHECK(point.w[6] == 0.1);
  CHECK(point.w.head(6).isZero(0.0));
}

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spotiv {

enum class ErrorCode {
  DimensionMismatch,
  SampleTooSmall,
  OutcomeNotBinary,
  SingleClassOutcome,
  NonFinite,
  RankDeficientDesign,
  EmptyClass,
  DegenerateSlicing,
  NoRelevantInstruments,
  EmptyNeighborhood,
  BootstrapExhausted,
  InvalidArgument,
  Parse,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a stable code so callers (the
/// CLI in particular) can map it to an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace spotiv

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace balance {

enum class ErrorCode {
  EmptyProfession,
  MalformedRecord,
  SchemaViolation,
  InvariantViolation,
  IoError,
  NetworkError,
  AuthError,
  InvalidSpec,
  EraUnknown,
  NonPositiveBaseline,
  EmptyDistribution,
  QOutOfRange,
  BadQuantileRange,
  TooFewBuilds,
  InsufficientSamples,
  ZeroMedian,
  MismatchedContext,
  NoQualifyingPairs,
  EmptyEra,
  OutOfRange,
  TooFewResponses,
  DegenerateColumn,
  TooFewParticipants,
  IncompleteMatrix,
  DegenerateAgreement,
  EmptyDataset,
  InvalidSurvey,
  LengthMismatch,
  TooShort,
  DegenerateRanks,
  InsufficientOverlap,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every module reports failures through this one exception type. `field`
// names the offending input (a JSON path, a file path, a build key, ...)
// and may be empty.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string field, const std::string& detail = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace balance

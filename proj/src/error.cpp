#include "balance/error.hpp"

namespace balance {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyProfession: return "EmptyProfession";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EraUnknown: return "EraUnknown";
    case ErrorCode::NonPositiveBaseline: return "NonPositiveBaseline";
    case ErrorCode::EmptyDistribution: return "EmptyDistribution";
    case ErrorCode::QOutOfRange: return "QOutOfRange";
    case ErrorCode::BadQuantileRange: return "BadQuantileRange";
    case ErrorCode::TooFewBuilds: return "TooFewBuilds";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::ZeroMedian: return "ZeroMedian";
    case ErrorCode::MismatchedContext: return "MismatchedContext";
    case ErrorCode::NoQualifyingPairs: return "NoQualifyingPairs";
    case ErrorCode::EmptyEra: return "EmptyEra";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TooFewResponses: return "TooFewResponses";
    case ErrorCode::DegenerateColumn: return "DegenerateColumn";
    case ErrorCode::TooFewParticipants: return "TooFewParticipants";
    case ErrorCode::IncompleteMatrix: return "IncompleteMatrix";
    case ErrorCode::DegenerateAgreement: return "DegenerateAgreement";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InvalidSurvey: return "InvalidSurvey";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::DegenerateRanks: return "DegenerateRanks";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& field, const std::string& detail) {
  std::string msg(to_string(code));
  if (!field.empty()) msg += "(" + field + ")";
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

Error::Error(ErrorCode code, std::string field, const std::string& detail)
    : std::runtime_error(format_message(code, field, detail)), code_(code), field_(std::move(field)) {}

}  // namespace balance

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace net2rdm {

enum class ErrorCode {
  InvalidArgument,
  MismatchedStimulusCount,
  NonFiniteValue,
  DuplicateLayerName,
  DuplicateId,
  InvalidRdm,
  InsufficientOverlap,
  ConstantRow,
  ZeroNormRow,
  TooFewConditions,
  ConstantInput,
  LengthMismatch,
  AllTied,
  TooFewSubjects,
  InvalidP,
  EmptyInput,
  ConditionMismatch,
  SubjectMismatch,
  TooManyFolds,
  TestFoldTooSmall,
  AllCentersInvalid,
  BadMagic,
  UnsupportedDescr,
  FortranOrderUnsupported,
  TruncatedPayload,
  UnsupportedShape,
  IoError,
  ManifestError,
  AsymmetricRdm,
  NonzeroDiagonal,
  ShapeMismatch,
  WrongKind,
  UnknownMetric,
  OutputExists,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every recoverable failure in the library is reported as an Error carrying
/// a machine-readable code; the CLI maps codes onto its E_* vocabulary.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace net2rdm

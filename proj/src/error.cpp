#include "net2rdm/error.hpp"

namespace net2rdm {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MismatchedStimulusCount: return "MismatchedStimulusCount";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::DuplicateLayerName: return "DuplicateLayerName";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InvalidRdm: return "InvalidRdm";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::ConstantRow: return "ConstantRow";
    case ErrorCode::ZeroNormRow: return "ZeroNormRow";
    case ErrorCode::TooFewConditions: return "TooFewConditions";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::AllTied: return "AllTied";
    case ErrorCode::TooFewSubjects: return "TooFewSubjects";
    case ErrorCode::InvalidP: return "InvalidP";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ConditionMismatch: return "ConditionMismatch";
    case ErrorCode::SubjectMismatch: return "SubjectMismatch";
    case ErrorCode::TooManyFolds: return "TooManyFolds";
    case ErrorCode::TestFoldTooSmall: return "TestFoldTooSmall";
    case ErrorCode::AllCentersInvalid: return "AllCentersInvalid";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedDescr: return "UnsupportedDescr";
    case ErrorCode::FortranOrderUnsupported: return "FortranOrderUnsupported";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::UnsupportedShape: return "UnsupportedShape";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ManifestError: return "ManifestError";
    case ErrorCode::AsymmetricRdm: return "AsymmetricRdm";
    case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::WrongKind: return "WrongKind";
    case ErrorCode::UnknownMetric: return "UnknownMetric";
    case ErrorCode::OutputExists: return "OutputExists";
  }
  return "Unknown";
}

}  // namespace net2rdm

#include "repaudit/error.hpp"

namespace repaudit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kEmptySet: return "empty-set";
    case ErrorCode::kInvalidSet: return "invalid-set";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kVersionMismatch: return "version-mismatch";
    case ErrorCode::kUnsupportedDtype: return "unsupported-dtype";
    case ErrorCode::kChecksumMismatch: return "checksum-mismatch";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kMalformed: return "malformed";
    case ErrorCode::kNonFinite: return "non-finite";
    case ErrorCode::kManifestInvalid: return "manifest-invalid";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kExtractorMismatch: return "extractor-mismatch";
    case ErrorCode::kInsufficientSamples: return "insufficient-samples";
    case ErrorCode::kZeroNorm: return "zero-norm";
    case ErrorCode::kNotSymmetric: return "not-symmetric";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
      return kExitIo;
    case ErrorCode::kZeroNorm:
    case ErrorCode::kNotSymmetric:
    case ErrorCode::kNumeric:
      return kExitNumeric;
    default:
      return kExitValidation;
  }
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(to_string(code)) + ": " + message);
}

}  // namespace repaudit

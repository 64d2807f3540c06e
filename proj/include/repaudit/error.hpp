#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace repaudit {

enum class ErrorCode {
  kInvalidArgument,
  kEmptySet,
  kInvalidSet,
  kBadMagic,
  kVersionMismatch,
  kUnsupportedDtype,
  kChecksumMismatch,
  kTruncated,
  kMalformed,
  kNonFinite,
  kManifestInvalid,
  kDimensionMismatch,
  kExtractorMismatch,
  kInsufficientSamples,
  kZeroNorm,
  kNotSymmetric,
  kNumeric,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Process exit codes used by the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumeric = 4;

int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace repaudit

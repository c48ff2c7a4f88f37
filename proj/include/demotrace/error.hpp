#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace demotrace {

enum class ErrorCode {
  kNonPositiveDepth,
  kInvalidDepth,
  kInvalidArgument,
  kDimensionMismatch,
  kNoCandidates,
  kEmptyTrack,
  kEmptyReprojection,
  kNoViews,
  kNoContact,
  kMissingPose,
  kWrongFrameTag,
  kFrameMismatch,
  kManifestInvalid,
  kMissingInput,
  kMissingGroundTruth,
  kUnknownStage,
  kFormat,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library carries a machine-readable code so the
// pipeline can record it in stage reports.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace demotrace

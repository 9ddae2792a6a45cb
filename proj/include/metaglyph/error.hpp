#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace metaglyph {

enum class ErrorCode {
  // dataset
  EmptyFile,
  RaggedRows,
  ZeroRows,
  AllEmpty,
  InvalidGroup,
  // metaphor
  NoSource,
  RemoteUnavailable,
  ParseError,
  UnsupportedFeature,
  AllPruned,
  TooSimple,
  TooComplex,
  MultiLayer,
  // semantics
  BackendUnavailable,
  // search
  TreeExhausted,
  NoValidSolution,
  SpaceTooLarge,
  // render
  ChannelExhausted,
  UnknownRegion,
  // service
  NoCandidates,
  UnsatisfiablePin,
  StaleRevision,
  UnknownResult,
  UnknownSession,
  InvalidRequest,
  Internal,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// service and the CLI can map it onto a status or an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace metaglyph

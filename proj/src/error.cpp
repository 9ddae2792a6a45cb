#include "metaglyph/error.hpp"

namespace metaglyph {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::ZeroRows: return "ZeroRows";
    case ErrorCode::AllEmpty: return "AllEmpty";
    case ErrorCode::InvalidGroup: return "InvalidGroup";
    case ErrorCode::NoSource: return "NoSource";
    case ErrorCode::RemoteUnavailable: return "RemoteUnavailable";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::AllPruned: return "AllPruned";
    case ErrorCode::TooSimple: return "TooSimple";
    case ErrorCode::TooComplex: return "TooComplex";
    case ErrorCode::MultiLayer: return "MultiLayer";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::TreeExhausted: return "TreeExhausted";
    case ErrorCode::NoValidSolution: return "NoValidSolution";
    case ErrorCode::SpaceTooLarge: return "SpaceTooLarge";
    case ErrorCode::ChannelExhausted: return "ChannelExhausted";
    case ErrorCode::UnknownRegion: return "UnknownRegion";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::UnsatisfiablePin: return "UnsatisfiablePin";
    case ErrorCode::StaleRevision: return "StaleRevision";
    case ErrorCode::UnknownResult: return "UnknownResult";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace metaglyph

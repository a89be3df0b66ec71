#pragma once

#include <stdexcept>
#include <string>

namespace constshape {

enum class ErrorCode {
  NotExpansive,
  AmbiguousExpansion,
  SingularMatrix,
  BadDomain,
  NotStabilized,
  ResourceLimit,
  BadB,
  NotFolner,
  NotCovered,
  Ambiguous,
  NoDecomposition,
  MissingTableEntry,
  IncompleteLanguage,
  NotCertified,
  WindowTooSmall,
  Schema,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotExpansive: return "NotExpansive";
    case ErrorCode::AmbiguousExpansion: return "AmbiguousExpansion";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::BadDomain: return "BadDomain";
    case ErrorCode::NotStabilized: return "NotStabilized";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::BadB: return "BadB";
    case ErrorCode::NotFolner: return "NotFolner";
    case ErrorCode::NotCovered: return "NotCovered";
    case ErrorCode::Ambiguous: return "Ambiguous";
    case ErrorCode::NoDecomposition: return "NoDecomposition";
    case ErrorCode::MissingTableEntry: return "MissingTableEntry";
    case ErrorCode::IncompleteLanguage: return "IncompleteLanguage";
    case ErrorCode::NotCertified: return "NotCertified";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::Schema: return "Schema";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace constshape

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vso {

enum class ErrorCode {
  Syntax,
  Reference,
  Invariant,
  TypeMismatch,
  UnknownParam,
  AxisConflict,
  UnitConflict,
  BasisIdCollision,
  ModelIdCollision,
  UnknownModel,
  UnknownBasis,
  NoPlan,
  ModeSpecMissing,
  InvalidRequest,
  UnresolvedParam,
  MissingPackage,
  SignatureMismatch,
  DuplicatePackage,
  CycleDetected,
  BlockFailed,
  NoComposite,
  UnknownSession,
  UnknownRun,
  UnknownClass,
  UnknownCommand,
  Io,
};

/// Stable external name of an error code ("SyntaxError", "NoPlan", ...).
std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the engine. `path` locates the offending element
/// (a document path, a DataRef, a block id) and may be empty.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string path, const std::string& message)
      : std::runtime_error(message), code_(code), path_(std::move(path)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorCode code_;
  std::string path_;
};

}  // namespace vso

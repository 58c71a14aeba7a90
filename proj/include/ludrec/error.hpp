#pragma once

#include <stdexcept>
#include <string>

namespace ludrec {

enum class ErrorKind {
  kPrecondition,
  kCoincidentPoints,
  kDegenerateDirection,
  kInfeasibleBound,
  kDisconnectedGraph,
  kSizeLimit,
  kEmptyEdgeSet,
  kDegenerateScale,
  kParse,
};

const char* ToString(ErrorKind kind);

/// Exception type thrown by every library entry point. The kind lets the CLI
/// map failures onto its exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ludrec

#pragma once

#include <stdexcept>
#include <string>

namespace fhn {

enum class ErrorKind {
  InvalidArgument,
  InvalidData,
  OutOfDomain,
  IllConditionedBasis,
  InitializationFailure,
  BlowUp,
  SolverFailure,
  OracleFailure,
  UndefinedOrder,
  InternalConsistency,
};

const char* to_string(ErrorKind kind);

/// Exception carrying a machine-checkable failure category.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidData: return "invalid-data";
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::IllConditionedBasis: return "ill-conditioned-basis";
    case ErrorKind::InitializationFailure: return "initialization-failure";
    case ErrorKind::BlowUp: return "blow-up";
    case ErrorKind::SolverFailure: return "solver-failure";
    case ErrorKind::OracleFailure: return "oracle-failure";
    case ErrorKind::UndefinedOrder: return "undefined-order";
    case ErrorKind::InternalConsistency: return "internal-consistency";
  }
  return "unknown";
}

#define FHN_REQUIRE(cond, kind, msg)                 \
  do {                                               \
    if (!(cond)) throw ::fhn::Error((kind), (msg));  \
  } while (0)

}  // namespace fhn

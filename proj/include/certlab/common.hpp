// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace certlab {

/// Default numeric tolerance for state validation and exact-identity checks.
inline constexpr double kDefaultTol = 1e-9;

enum class ErrorKind {
  NotHermitian,
  NotPSD,
  BadTrace,
  DimMismatch,
  NonPositiveP,
  OutsideBlochBall,
  BadDim,
  NonTraceless,
  EpsOutOfRange,
  ZeroEigenvalue,
  PreconditionViolated,
  UnknownBucket,
  OddDim,
  EigTooSmall,
  MagnitudeTooLarge,
  FarnessDeficit,
  SpectrumOutOfRegime,
  SingularSigma,
  TooLarge,
  InfiniteSupport,
  ZeroMassCell,
  NoMultiBuckets,
  EmptySum,
  ZeroMassBlock,
  ConfigInvalid,
  ParseError,
  InvariantViolation,
  IoError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace certlab

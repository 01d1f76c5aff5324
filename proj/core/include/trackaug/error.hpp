// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trackaug {

enum class ErrorCode {
  kInvalidArgument,
  kInfeasibleBoundary,
  kEmptyCrop,
  kEmptyObject,
  kNoDistractor,
  kFootprintTooLarge,
  kParse,
  kStructural,
  kRange,
  kIo,
};

std::string_view to_string(ErrorCode code) noexcept;

/// All library failures surface as this exception; `code()` tells callers
/// which recovery applies (e.g. redraw on kInfeasibleBoundary).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::kInvalidArgument, what);
}

}  // namespace trackaug

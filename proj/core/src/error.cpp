// SPDX-License-Identifier: Apache-2.0

#include "trackaug/error.hpp"

namespace trackaug {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInfeasibleBoundary: return "infeasible-boundary";
    case ErrorCode::kEmptyCrop: return "empty-crop";
    case ErrorCode::kEmptyObject: return "empty-object";
    case ErrorCode::kNoDistractor: return "no-distractor";
    case ErrorCode::kFootprintTooLarge: return "footprint-too-large";
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kStructural: return "structural-error";
    case ErrorCode::kRange: return "range-error";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace trackaug

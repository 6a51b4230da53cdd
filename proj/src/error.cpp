// SPDX-License-Identifier: Apache-2.0
#include "oslx/error.hpp"

namespace oslx {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::range: return "range error";
        case ErrorCode::tripling_unavailable: return "tripling unavailable";
        case ErrorCode::degenerate_input: return "degenerate input";
        case ErrorCode::unsupported_cube: return "unsupported cube";
        case ErrorCode::domain: return "domain error";
        case ErrorCode::containment: return "containment error";
        case ErrorCode::parse: return "parse error";
        case ErrorCode::validation: return "validation error";
        case ErrorCode::stale_calibration: return "stale calibration";
        case ErrorCode::oracle_mismatch: return "oracle mismatch";
    }
    return "error";
}

}  // namespace oslx

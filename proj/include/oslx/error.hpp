// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oslx {

enum class ErrorCode {
    range,                 // cube outside the table's index range
    tripling_unavailable,  // 3Q leaves the domain
    degenerate_input,      // constant f, zero sharp maximal, ...
    unsupported_cube,      // local dyadic operator on a non power-of-two side
    domain,                // log of a nonpositive value, etc.
    containment,           // E not contained in Q
    parse,                 // malformed grid file
    validation,            // bad parameters or nonpositive weight
    stale_calibration,     // calibration hash does not match the corpus
    oracle_mismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace oslx

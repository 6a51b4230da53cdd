// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "json.hpp"
#include "oslx/oscillation.hpp"
#include "oslx/verify.hpp"

namespace oslx {

using Json = nlohmann::ordered_json;

/// Serializes with every floating-point number printed as %.17g and
/// non-finite numbers as null, so equal values give equal bytes.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const GridCube& q);
/// {value, witness: {anchor, side}, family, mode}
Json to_json(const SeminormReport& r, BoundaryMode mode);
Json to_json(const WeightConstants& c);
Json to_json(const RatioRecord& r);
/// Summary of a profile: sample count, fit and the endpoints.
Json summary_json(const TailProfile& profile);

/// CSV with header t,mass,fitted_rate; one row per t sample.
std::string tail_csv(const TailProfile& profile);

}  // namespace oslx

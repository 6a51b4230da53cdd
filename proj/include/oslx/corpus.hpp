// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "oslx/grid.hpp"

namespace oslx {

/// The one seeded generator every corpus draw goes through. The engine is
/// fully specified by the standard; the conversions below are ours, so draws
/// are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) { return bound <= 1 ? 0 : engine_() % bound; }
    int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
    bool coin() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

/// f on the grid plus the maximal function the continuous problem has in
/// closed form.
struct AnalyticExample {
    GridFunction grid_values;
    GridFunction analytic_maximal;
    std::string provenance;
};

/// f = 2 chi_H with H = {cells whose index along `axis` is >= boundary_cell}
/// (the complement when `complement` is set). The analytic maximal function
/// is 2 on H and 1 off H.
AnalyticExample half_space_example(int n, int dim, int axis, int boundary_cell, bool complement = false);

/// log|x - center| at cell centers, with the distance clamped below at half
/// a cell width.
GridFunction log_abs_demo(int n, int dim, std::array<double, 2> center);

/// Values of M(log|x|) at fixed points as the sampled window widens.
struct LogAbsGrowth {
    std::vector<int> caps;             ///< window width in domain units
    std::vector<double> center_value;  ///< Mf at the cell holding the singularity
    std::vector<double> offset_value;  ///< Mf at the cell `offset` to its right
    std::vector<double> window_mean;   ///< mean of |f| over the whole window
};

/// One-dimensional demonstration: log|x| sampled with N cells per unit on
/// windows [-cap/2, cap/2), cap in `caps` (powers of two), restricted mode.
LogAbsGrowth log_abs_growth(int n, double offset, std::span<const int> caps);

/// |x - center|^a at cell centers, distance clamped at half a cell width.
Weight power_weight(int n, int dim, double exponent, std::array<double, 2> center);

/// 1 on the lower half along axis 0 and k on the upper half.
Weight two_valued_weight(int n, int dim, double k);

/// 1 everywhere except k on the cell holding `center`.
Weight spike_weight(int n, int dim, double k, std::array<double, 2> center);

/// Sum over dyadic levels 1..depth of +-amplitude on each block, signs from
/// the seed. depth 0 gives the zero function.
GridFunction random_dyadic_bmo(int n, int dim, int depth, double amplitude, std::uint64_t seed);

/// (M mu)^delta for mu a sum of unit point masses: the first at the center
/// cell, then seed % 3 more at seeded random cells. Restricted mode.
Weight a1_family(int n, int dim, double delta, std::uint64_t seed);

/// Declarative description of a generated grid, serializable as a manifest.
struct GeneratorSpec {
    std::string generator;  ///< half-space, analytic-half-space, log-abs, power-weight,
                            ///< two-valued, spike, random-bmo, a1-family, constant
    int n = 64;
    int dim = 1;
    std::map<std::string, double> params;
    std::uint64_t seed = 0;

    double param(const std::string& key, double fallback) const {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }
};

nlohmann::ordered_json to_json(const GeneratorSpec& spec);
GeneratorSpec generator_spec_from_json(const nlohmann::json& j);

/// Runs the generator. Weight generators return the (floored) weight values;
/// analytic-half-space returns the analytic maximal field.
GridFunction generate(const GeneratorSpec& spec);
bool is_weight_generator(const std::string& generator) noexcept;

}  // namespace oslx

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oslx/corpus.hpp"
#include "oslx/report.hpp"
#include "oslx/verify.hpp"

namespace oslx {

// ---------------------------------------------------------------------------
// Suite definition

/// Inputs of one dimension of a suite.
struct DimSuite {
    int dim = 1;
    int n = 64;
    int machinery_n = 16;  ///< resolution for the all-cubes reverse Hoelder checks
    int x_side_divisor = 4;  ///< Coifman-Rochberg members use dyadic Q with side >= N / divisor
    std::vector<GeneratorSpec> functions;
    std::vector<GeneratorSpec> weights;
};

struct SuiteConfig {
    std::string name = "default";
    std::uint64_t seed = 0;
    BoundaryMode mode = BoundaryMode::restricted;
    Family family = Family::dyadic;  ///< family of the A-infinity constants
    std::vector<double> p_values{1.0, 2.0, 4.0, 8.0};
    int dyadic_min_divisor = 8;      ///< sweep cubes: dyadic with side >= N / divisor ...
    int random_cubes = 8;            ///< ... plus this many random cubes per pair
    int good_lambda_checks = 100;    ///< random (lambda, gamma) per pair
    int probe_cases = 50;            ///< (f, Q) per dimension
    int reverse_holder_cases = 100;  ///< (w, Q, E) per dimension
    int gamma_samples = 64;          ///< p in [1, 64]
    std::vector<DimSuite> dims;
};

/// The shipped calibration corpus: d = 1 at N = 512 and d = 2 at N = 64.
SuiteConfig default_suite();
/// Same structure at small resolutions, for quick runs.
SuiteConfig smoke_suite();
SuiteConfig suite_by_name(std::string_view name);

/// Same suite at twice the resolution, for the stability report.
SuiteConfig doubled(const SuiteConfig& config);

/// Stable display name of a generator spec, e.g. power-weight(a=1).
std::string describe(const GeneratorSpec& spec);

/// Everything that determines one dimension's results, as JSON.
Json suite_manifest(const SuiteConfig& config, const DimSuite& dim);
/// FNV-1a 64 of the serialized manifest, as 16 hex digits.
std::string corpus_hash(const SuiteConfig& config, const DimSuite& dim);
std::uint64_t fnv1a(std::string_view bytes) noexcept;

/// "d{dim}/{mode}/{family}"
std::string calibration_key(int dim, BoundaryMode mode, Family family);

/// splitmix64 mixing of a base seed with tags; every random draw of the
/// suite takes its generator from here.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) noexcept;

/// Sweep cubes: every dyadic cube with side >= N / min_divisor, then
/// `random_count` cubes with power-of-two sides in [N/16, N/2] (at least 1)
/// and uniform anchors.
std::vector<GridCube> sweep_cubes(int n, int dim, int min_divisor, int random_count, Rng& rng);

// ---------------------------------------------------------------------------
// Frozen constants

enum class Bound { upper, lower };

struct ConstantDef {
    std::string_view name;
    std::string_view part;
    Bound bound;
};

/// thm1_c_star, cp_c_star, tail_kappa, x_lower, x_upper, llogl_lower,
/// llogl_upper, a1_cr_bound, nonlocal_c.
std::span<const ConstantDef> constant_defs() noexcept;

inline constexpr double kRegressionMargin = 0.05;
inline constexpr double kStabilityMargin = 0.25;

struct CalibrationEntry {
    std::string corpus_hash;
    int n = 0;
    std::map<std::string, double> constants;
};

struct Calibration {
    std::string suite;
    std::map<std::string, CalibrationEntry> entries;  ///< by calibration_key
};

Json to_json(const Calibration& c);
Calibration calibration_from_json(const nlohmann::json& j);
Calibration load_calibration(const std::filesystem::path& path);
void save_calibration(const std::filesystem::path& path, const Calibration& c);

// ---------------------------------------------------------------------------
// Running a suite

namespace part {
inline constexpr unsigned thm1 = 1u << 0;
inline constexpr unsigned tail = 1u << 1;
inline constexpr unsigned goodlambda = 1u << 2;
inline constexpr unsigned cp = 1u << 3;
inline constexpr unsigned probe = 1u << 4;
inline constexpr unsigned machinery = 1u << 5;
inline constexpr unsigned x = 1u << 6;
inline constexpr unsigned chr = 1u << 7;
inline constexpr unsigned all = (1u << 8) - 1;
}  // namespace part

/// thm1, tail, goodlambda, cp, probe, machinery, x, char or all.
unsigned parse_part(std::string_view text);
std::string_view part_name(unsigned bit);

struct PairTail {
    std::string f;
    std::string w;
    GridCube cube;
    double a_infty = 1.0;
    TailProfile profile;  ///< t and mass cleared unless this is a witness
    bool monotone = true;
};

struct WeightRow {
    std::string name;
    WeightConstants constants;
    std::optional<XEstimate> x;
    std::optional<CharLowerBound> chr;
    bool unit = false;  ///< w == 1
};

struct DimResults {
    std::string key;
    std::string corpus_hash;
    int dim = 1;
    int n = 0;
    std::vector<std::string> functions;
    std::vector<WeightRow> weights;

    std::vector<RatioRecord> thm1;
    std::size_t thm1_monotone_violations = 0;
    double linear_p_worst = 0.0;  ///< max over pairs of max/min of sup_Q normalized, p <= 4
    std::string linear_p_witness;

    std::vector<PairTail> tails;
    std::size_t tail_monotone_violations = 0;
    std::size_t tail_fits = 0;
    std::size_t tail_nonnegative_rates = 0;
    std::optional<PairTail> tail_witness;  ///< profile with the smallest |rate| [w]_Ainf

    std::size_t good_lambda_checks = 0;
    std::size_t good_lambda_failures = 0;
    Json good_lambda_first_failure;

    std::vector<RatioRecord> cp;

    std::vector<Json> probes;
    std::size_t probe_cases = 0;

    std::size_t reverse_holder_cases = 0;
    std::size_t reverse_holder_failures = 0;
    double llogl_min = 0.0;
    double llogl_max = 0.0;
    double cr_a1_max = 0.0;
    double cr_v_min = 0.0;  ///< min over the sweep cubes of min_Q v (restricted)
    double gamma_max = 0.0;
    std::size_t gamma_failures = 0;

    std::map<std::string, double> observed;  ///< constants measured by this run
};

struct SuiteResults {
    std::string suite;
    BoundaryMode mode = BoundaryMode::restricted;
    Family family = Family::dyadic;
    unsigned parts = part::all;
    std::vector<DimResults> dims;
};

SuiteResults run_suite(const SuiteConfig& config, unsigned parts = part::all);

/// Grids supplied by the caller instead of a generated corpus.
struct CustomInputs {
    std::vector<std::string> f_names;
    std::vector<GridFunction> fs;
    std::vector<std::string> w_names;
    std::vector<Weight> ws;
};

/// Runs the parts on every (f, w) pair of `inputs` with the sweep settings of
/// `config`. The machinery part needs generated weights and is rejected.
SuiteResults run_custom(const SuiteConfig& config, const CustomInputs& inputs, unsigned parts);

/// Constants of a full run, merged into `base` (other keys are kept).
Calibration calibrate(const SuiteResults& results, Calibration base = {});

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Throws stale_calibration if an entry is missing or its corpus hash does
/// not match the run.
void require_fresh(const SuiteResults& results, const Calibration& calibration);

/// Property checks of the parts that ran, plus regression of every observed
/// constant against its frozen value (5% margin). Calls require_fresh first
/// unless `require_hash` is off (runs on custom inputs).
std::vector<Check> evaluate(const SuiteResults& results, const Calibration& calibration, bool require_hash = true);

/// Observed constants at doubled resolution against frozen ones, 25% margin.
/// Informational; never fails a run.
std::vector<Check> stability_report(const SuiteResults& doubled_results, const Calibration& calibration);

/// Full JSON report: manifest hashes, records, profiles, checks.
Json results_json(const SuiteResults& results, const std::vector<Check>& checks);

}  // namespace oslx

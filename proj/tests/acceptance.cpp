// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every tolerance used below is pinned in this file.
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "oslx/calibration.hpp"
#include "oslx/corpus.hpp"
#include "oslx/error.hpp"
#include "oslx/grid_io.hpp"
#include "oslx/operators.hpp"
#include "oslx/oscillation.hpp"
#include "oslx/verify.hpp"

namespace fs = std::filesystem;
using namespace oslx;

namespace {

// ---- pinned tolerances ----------------------------------------------------
constexpr double kOracleRel = 1e-9;          // fast vs naive, per cell, relative
constexpr double kDominationAbs = 1e-12;     // M#f <= 2 Mf + tol
constexpr double kHalfSpaceAbs = 1e-12;      // ||chi_H||_BMO = 1/2, char bound
constexpr double kAInftyFloorAbs = 1e-12;    // [w]_Ainf >= 1 - tol
constexpr double kAInftyUnitAbs = 1e-9;      // [w = 1]_Ainf = 1 +- tol
constexpr double kAInftyScaleRel = 1e-9;     // [lambda w]_Ainf = [w]_Ainf
constexpr double kLocalMaximalRel = 1e-9;    // local dyadic operator vs naive
constexpr double kCrUnitAbs = 1e-12;         // v >= 1 on Q
constexpr double kAInftySpanLow = 1.0 + 1e-9;  // corpus must contain [w]_Ainf <= this ...
constexpr double kAInftySpanHigh = 18.0;       // ... and some [w]_Ainf >= this (target ~20)
constexpr int kMinPairs = 20;
constexpr int kD1Inputs = 200;
constexpr int kD2Inputs = 50;
constexpr int kD1MaxLog = 8;  // N <= 256
constexpr int kD2MaxLog = 5;  // N <= 32
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s: %s -- %s (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", title.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string num(double v) { return format_number(v); }

bool rel_ok(double a, double b, double tol) {
    if (a == b) return true;
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

// ---- shared inputs ----------------------------------------------------------

std::vector<GridFunction> random_inputs() {
    std::vector<GridFunction> out;
    for (int i = 0; i < kD1Inputs + kD2Inputs; ++i) {
        const int dim = i < kD1Inputs ? 1 : 2;
        Rng rng(derive_seed(kSeed, {1, static_cast<std::uint64_t>(i)}));
        const int max_log = dim == 1 ? kD1MaxLog : kD2MaxLog;
        // The first inputs of each dimension sit at the largest resolution.
        const int local = dim == 1 ? i : i - kD1Inputs;
        const int n = 1 << (local < 4 ? max_log : rng.between(1, max_log));
        const std::size_t cells = dim == 1 ? n : static_cast<std::size_t>(n) * n;
        std::vector<double> v(cells, 0.0);
        switch (local % 4) {
            case 0:
                for (auto& x : v) x = rng.uniform(-1.0, 1.0);
                break;
            case 1:
            {
                const GridFunction g = random_dyadic_bmo(n, dim, std::min(5, std::countr_zero(static_cast<unsigned>(n))), 1.0, rng.bits());
                v.assign(g.values().begin(), g.values().end());
                break;
            }
            case 2: {
                const int b = rng.between(0, n - 1);
                const int axis = dim == 2 ? rng.between(0, 1) : 0;
                for (std::size_t c = 0; c < cells; ++c) {
                    const int coord = dim == 1 ? static_cast<int>(c) : (axis == 0 ? c / n : c % n);
                    v[c] = coord >= b ? 1.0 : 0.0;
                }
                break;
            }
            default:
                for (auto& x : v) x = rng.uniform() < 0.1 ? rng.uniform(0.0, 100.0) : 0.0;
                break;
        }
        out.emplace_back(dim, n, std::move(v));
    }
    return out;
}

constexpr std::array<BoundaryMode, 3> kModes{BoundaryMode::restricted, BoundaryMode::zero_extension,
                                             BoundaryMode::dyadic};

std::vector<GridFunction> suite_functions(bool weights_too) {
    std::vector<GridFunction> out;
    for (const auto& ds : default_suite().dims) {
        for (const auto& s : ds.functions) out.push_back(generate(s));
        if (weights_too)
            for (const auto& s : ds.weights) out.push_back(generate(s));
    }
    return out;
}

std::vector<Weight> suite_weights() {
    std::vector<Weight> out;
    for (const auto& ds : default_suite().dims)
        for (const auto& s : ds.weights) out.emplace_back(generate(s));
    return out;
}

// ---- suite runs shared by criteria 5-10 ---------------------------------------

struct SuiteRun {
    BoundaryMode mode;
    SuiteResults results;
    std::vector<Check> checks;
};

std::vector<SuiteRun>& suite_runs() {
    static std::vector<SuiteRun> runs = [] {
        const Calibration cal = load_calibration(OSLX_CALIBRATION_PATH);
        std::vector<SuiteRun> out;
        for (BoundaryMode mode : {BoundaryMode::restricted, BoundaryMode::dyadic}) {
            SuiteConfig cfg = default_suite();
            cfg.mode = mode;
            SuiteResults r = run_suite(cfg, part::all);
            auto checks = evaluate(r, cal, true);
            out.push_back(SuiteRun{mode, std::move(r), std::move(checks)});
        }
        return out;
    }();
    return runs;
}

/// Evaluates every calibration check whose part (the text after the key) is in `parts`.
Outcome checks_for(const std::vector<std::string>& parts) {
    Outcome o;
    std::size_t n = 0;
    for (const auto& run : suite_runs()) {
        for (const auto& c : run.checks) {
            const auto space = c.name.find(' ');
            const std::string part = c.name.substr(space + 1, c.name.find('.', space) - space - 1);
            if (std::find(parts.begin(), parts.end(), part) == parts.end()) continue;
            ++n;
            if (!c.pass) {
                o.pass = false;
                o.detail += "[" + c.name + ": " + c.detail + "] ";
            }
        }
    }
    if (n == 0) return {false, "no checks produced"};
    if (o.pass) o.detail = std::to_string(n) + " calibration checks pass";
    return o;
}

void merge(Outcome& into, const Outcome& more) {
    into.pass = into.pass && more.pass;
    if (!more.detail.empty()) into.detail += (into.detail.empty() ? "" : "; ") + more.detail;
}

// ---- CLI helpers ---------------------------------------------------------------

struct CliRun {
    int exit_code = -1;
    std::string out;
};

CliRun cli(const fs::path& dir, const std::string& env, const std::string& args) {
    const std::string cmd = "cd '" + dir.string() + "' && " + env + " '" OSLX_CLI_PATH "' " + args + " 2>&1";
    CliRun r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
    return out;
}

}  // namespace

int main() {
    const std::vector<GridFunction> inputs = random_inputs();

    report(1, "fast maximal and sharp maximal equal their naive twins", [&] {
        Outcome o;
        std::size_t compared = 0;
        for (const auto& f : inputs) {
            for (BoundaryMode mode : kModes) {
                const auto fast_m = maximal(f, mode).values;
                const auto slow_m = maximal_naive(f, mode).values;
                const auto fast_s = sharp_maximal(f, mode).values;
                const auto slow_s = sharp_maximal_naive(f, mode).values;
                for (std::size_t i = 0; i < f.size(); ++i) {
                    ++compared;
                    if (!rel_ok(fast_m[i], slow_m[i], kOracleRel) || !rel_ok(fast_s[i], slow_s[i], kOracleRel)) {
                        if (o.pass)
                            o.detail = "first mismatch d" + std::to_string(f.dim()) + " N=" +
                                       std::to_string(f.resolution()) + " " + std::string(to_string(mode)) +
                                       " cell " + std::to_string(i) + ": M " + num(fast_m[i]) + " vs " +
                                       num(slow_m[i]) + ", M# " + num(fast_s[i]) + " vs " + num(slow_s[i]);
                        o.pass = false;
                    }
                }
            }
        }
        if (o.pass)
            o.detail = std::to_string(kD1Inputs) + " d=1 and " + std::to_string(kD2Inputs) +
                       " d=2 inputs, 3 modes, " + std::to_string(compared) + " cell pairs within " + num(kOracleRel);
        return o;
    });

    report(2, "pointwise domination M#f <= 2 Mf", [&] {
        std::vector<GridFunction> all = inputs;
        for (auto& g : suite_functions(true)) all.push_back(std::move(g));
        double worst = -std::numeric_limits<double>::infinity();
        std::size_t cells = 0;
        for (const auto& f : all) {
            for (BoundaryMode mode : kModes) {
                const auto m = maximal(f, mode).values;
                const auto s = sharp_maximal(f, mode).values;
                for (std::size_t i = 0; i < f.size(); ++i) {
                    worst = std::max(worst, s[i] - 2.0 * m[i]);
                    ++cells;
                }
            }
        }
        return Outcome{worst <= kDominationAbs, std::to_string(all.size()) + " grids x 3 modes, " +
                                                    std::to_string(cells) + " cells, max(M#f - 2Mf) = " + num(worst)};
    });

    report(3, "half-space exactness", [&] {
        Outcome o;
        double bmo_err = 0.0;
        double essinf_err = 0.0;
        std::size_t straddling = 0;
        for (auto [dim, n] : {std::pair{1, 64}, std::pair{1, 256}, std::pair{2, 16}, std::pair{2, 32}}) {
            for (int axis = 0; axis < dim; ++axis) {
                for (int b : {n / 4, n / 2, 3 * n / 4}) {
                    for (bool complement : {false, true}) {
                        const auto ex = half_space_example(n, dim, axis, b, complement);
                        // chi_H with values in {0, 1}: rescale the generated step to unit height.
                        const double hi = *std::max_element(ex.grid_values.values().begin(),
                                                            ex.grid_values.values().end());
                        const GridFunction chi = ex.grid_values.map([hi](double x) { return x / hi; });
                        bmo_err = std::max(bmo_err, std::abs(bmo_seminorm(chi, Family::all).value - 0.5));
                        // Straddling cubes see both sides of the boundary; the analytic
                        // maximal field of the half-space is at least 1 there, with equality.
                        for (const auto& q : enumerate_cubes(n, dim, Family::all)) {
                            const int lo = q.anchor[axis];
                            if (!(lo < b && lo + q.side > b)) continue;
                            ++straddling;
                            essinf_err = std::max(essinf_err, std::abs(cube_min(ex.analytic_maximal, q) - 1.0));
                        }
                    }
                }
            }
        }
        if (bmo_err > kHalfSpaceAbs) {
            o.pass = false;
            o.detail += "| ||chi_H||_BMO - 1/2 | = " + num(bmo_err) + "; ";
        }
        if (essinf_err != 0.0) {
            o.pass = false;
            o.detail += "essinf over straddling cubes off by " + num(essinf_err) + "; ";
        }
        double worst_char = std::numeric_limits<double>::infinity();
        const auto weights = suite_weights();
        for (const auto& w : weights) worst_char = std::min(worst_char, char_lower_bound(w).value);
        if (worst_char < 0.5 - kHalfSpaceAbs) {
            o.pass = false;
            o.detail += "char_lower_bound min " + num(worst_char) + "; ";
        }
        double unit_err = 0.0;
        for (auto [dim, n] : {std::pair{1, 512}, std::pair{2, 64}})
            unit_err = std::max(unit_err,
                                std::abs(char_lower_bound(Weight(GridFunction::constant(dim, n, 1.0))).value - 0.5));
        if (unit_err > kHalfSpaceAbs) {
            o.pass = false;
            o.detail += "w = 1 value off by " + num(unit_err);
        }
        merge(o, checks_for({"char"}));
        if (o.pass)
            o.detail = "BMO err " + num(bmo_err) + ", " + std::to_string(straddling) +
                       " straddling cubes with essinf exactly 1, char min " + num(worst_char) + " over " +
                       std::to_string(weights.size()) + " weights, w = 1 err " + num(unit_err);
        return o;
    });

    report(4, "A-infinity floor and scale invariance", [&] {
        Outcome o;
        std::vector<Weight> ws;
        for (const auto& ds : default_suite().dims)
            for (auto s : ds.weights) {
                // The exhaustive all-cubes family is checked at a reduced resolution.
                s.n = ds.dim == 1 ? 64 : 16;
                ws.emplace_back(generate(s));
            }
        for (int i = 0; i < 20; ++i) {
            Rng rng(derive_seed(kSeed, {4, static_cast<std::uint64_t>(i)}));
            const int dim = i % 2 + 1;
            const int n = dim == 1 ? 64 : 16;
            std::vector<double> v(dim == 1 ? n : n * n);
            for (auto& x : v) x = std::exp(rng.uniform(-4.0, 4.0));
            ws.emplace_back(GridFunction(dim, n, std::move(v)));
        }
        double floor_min = std::numeric_limits<double>::infinity();
        double scale_err = 0.0;
        std::size_t evaluated = 0;
        std::size_t scalings = 0;
        std::size_t skipped = 0;
        for (const auto& w : ws) {
            for (BoundaryMode mode : {BoundaryMode::restricted, BoundaryMode::dyadic}) {
                for (Family fam : {Family::all, Family::dyadic}) {
                    const double a = fujii_wilson(w, mode, fam).a_infty;
                    floor_min = std::min(floor_min, a);
                    ++evaluated;
                    for (double lambda : {1e-3, 0.5, 7.5, 1e6}) {
                        // The weight floor would replace entries pushed below it, so the
                        // result would no longer be lambda w; such scalings are skipped.
                        const auto vals = w.function().values();
                        if (lambda * *std::min_element(vals.begin(), vals.end()) < Weight::kFloor) {
                            ++skipped;
                            continue;
                        }
                        ++scalings;
                        const Weight scaled(w.function().map([lambda](double x) { return lambda * x; }));
                        const double b = fujii_wilson(scaled, mode, fam).a_infty;
                        scale_err = std::max(scale_err, std::abs(a - b) / a);
                    }
                }
            }
        }
        // Full-resolution corpus weights with the suite's family.
        for (const auto& w : suite_weights()) {
            floor_min = std::min(floor_min, fujii_wilson(w, BoundaryMode::restricted, Family::dyadic).a_infty);
            ++evaluated;
        }
        double unit_err = 0.0;
        for (auto [dim, n] : {std::pair{1, 64}, std::pair{1, 512}, std::pair{2, 16}, std::pair{2, 64}})
            for (Family fam : {Family::all, Family::dyadic}) {
                if (fam == Family::all && n > 64 / dim) continue;
                unit_err = std::max(unit_err, std::abs(fujii_wilson(Weight(GridFunction::constant(dim, n, 1.0)),
                                                                    BoundaryMode::restricted, fam)
                                                           .a_infty -
                                                       1.0));
            }
        if (floor_min < 1.0 - kAInftyFloorAbs) {
            o.pass = false;
            o.detail += "min [w]_Ainf " + num(floor_min) + "; ";
        }
        if (unit_err > kAInftyUnitAbs) {
            o.pass = false;
            o.detail += "[1]_Ainf off by " + num(unit_err) + "; ";
        }
        if (scale_err > kAInftyScaleRel) {
            o.pass = false;
            o.detail += "scaling changes [w]_Ainf by " + num(scale_err);
        }
        if (o.pass)
            o.detail = std::to_string(evaluated) + " evaluations, min " + num(floor_min) + ", unit err " +
                       num(unit_err) + ", worst relative change over " + std::to_string(scalings) +
                       " scalings " + num(scale_err) + " (" + std::to_string(skipped) +
                       " scalings skipped: they cross the weight floor)";
        return o;
    });

    report(5, "oscillation ratio: p-monotone, bounded normalized ratio, linear growth in p", [&] {
        Outcome o = checks_for({"thm1"});
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        std::string shape;
        for (const auto& run : suite_runs()) {
            for (const auto& d : run.results.dims) {
                const std::size_t pairs = d.functions.size() * d.weights.size();
                const int want_n = d.dim == 1 ? 512 : 64;
                if (pairs < static_cast<std::size_t>(kMinPairs) || d.n != want_n) {
                    o.pass = false;
                    o.detail += "; " + d.key + " has " + std::to_string(pairs) + " pairs at N=" + std::to_string(d.n);
                }
                if (run.mode != BoundaryMode::restricted) continue;
                shape += (shape.empty() ? "" : ", ") + d.key + " " + std::to_string(pairs) + " pairs";
                for (const auto& w : d.weights) {
                    lo = std::min(lo, w.constants.a_infty);
                    hi = std::max(hi, w.constants.a_infty);
                }
            }
        }
        const bool span_ok = lo <= kAInftySpanLow && hi >= kAInftySpanHigh;
        if (!span_ok) o.pass = false;
        o.detail += "; " + shape + "; [w]_Ainf span [" + num(lo) + ", " + num(hi) + "]";
        return o;
    });

    report(6, "oscillation tails and good-lambda inclusion", [&] {
        Outcome o = checks_for({"tail", "goodlambda"});
        for (const auto& run : suite_runs())
            for (const auto& d : run.results.dims) {
                const std::size_t want = d.functions.size() * d.weights.size() * 100;
                if (d.good_lambda_checks != want) {
                    o.pass = false;
                    o.detail += "; " + d.key + " ran " + std::to_string(d.good_lambda_checks) + " good-lambda checks";
                }
            }
        return o;
    });

    report(7, "extension inequality and local dyadic maximal operator", [&] {
        Outcome o = checks_for({"cp"});
        double worst = 0.0;
        std::size_t cubes = 0;
        for (int dim : {1, 2}) {
            const int n = 8;
            for (int i = 0; i < 10; ++i) {
                Rng rng(derive_seed(kSeed, {7, static_cast<std::uint64_t>(dim), static_cast<std::uint64_t>(i)}));
                std::vector<double> v(dim == 1 ? n : n * n);
                for (auto& x : v) x = rng.uniform(-2.0, 2.0);
                const GridFunction f(dim, n, std::move(v));
                for (const auto& q : enumerate_cubes(n, dim, Family::dyadic)) {
                    const auto fast = local_maximal(f, q);
                    const auto slow = local_maximal_naive(f, q);
                    const auto ref = oracle::local_dyadic(f, q.anchor[0], q.anchor[1], q.side);
                    ++cubes;
                    for (std::size_t k = 0; k < fast.size(); ++k) {
                        for (double other : {slow[k], ref[k]}) {
                            if (fast[k] == other) continue;
                            worst = std::max(worst, std::abs(fast[k] - other) /
                                                        std::max(std::abs(fast[k]), std::abs(other)));
                        }
                    }
                }
            }
        }
        merge(o, Outcome{worst <= kLocalMaximalRel, "local maximal on " + std::to_string(cubes) +
                                                        " dyadic cubes at N=8, worst relative gap " + num(worst)});
        return o;
    });

    report(8, "nonlocal bound probe", [&] {
        Outcome o = checks_for({"probe"});
        for (const auto& run : suite_runs())
            for (const auto& d : run.results.dims)
                if (d.probe_cases != 50) {
                    o.pass = false;
                    o.detail += "; " + d.key + " ran " + std::to_string(d.probe_cases) + " probes";
                }
        bool rejected = false;
        try {
            const GridFunction c = GridFunction::constant(1, 64, 3.0);
            nonlocal_bound_probe(c, GridCube{1, {16, 0}, 8}, BoundaryMode::restricted);
        } catch (const Error& e) {
            rejected = e.code() == ErrorCode::degenerate_input;
        }
        merge(o, Outcome{rejected, rejected ? "constant f rejected as degenerate input"
                                            : "constant f was not rejected as degenerate input"});
        return o;
    });

    report(9, "reverse Hoelder, LlogL, Coifman-Rochberg and Gamma growth", [&] {
        Outcome o = checks_for({"machinery"});
        for (const auto& run : suite_runs())
            for (const auto& d : run.results.dims) {
                if (d.reverse_holder_cases != 100) {
                    o.pass = false;
                    o.detail += "; " + d.key + " ran " + std::to_string(d.reverse_holder_cases) + " reverse Hoelder cases";
                }
                if (run.mode == BoundaryMode::restricted && d.cr_v_min < 1.0 - kCrUnitAbs) {
                    o.pass = false;
                    o.detail += "; " + d.key + " min v " + num(d.cr_v_min);
                }
            }
        double gmax = 0.0;
        bool gok = true;
        for (int i = 0; i < 64; ++i) {
            const double p = 1.0 + 63.0 * i / 63.0;
            const auto g = gamma_growth_check(p);
            gmax = std::max(gmax, g.value);
            gok = gok && g.ok && g.value <= 1.2;
        }
        merge(o, Outcome{gok, "Gamma(p+1)^(1/p)/p max " + num(gmax) + " over 64 samples of [1, 64]"});
        return o;
    });

    report(10, "two-sided estimate of x_hat against [w]_Ainf", [&] {
        Outcome o = checks_for({"x"});
        // Unit weight: the analytic half-space member alone certifies x_hat >= 1/2.
        double analytic_min = std::numeric_limits<double>::infinity();
        for (auto [dim, n] : {std::pair{1, 64}, std::pair{2, 16}}) {
            const Weight w(GridFunction::constant(dim, n, 1.0));
            const auto members = x_corpus(w, {}, BoundaryMode::restricted, 4);
            const auto est = x_estimate(w, members, BoundaryMode::restricted);
            for (const auto& row : est.rows)
                if (row.analytic) analytic_min = std::min(analytic_min, row.ratio);
            if (est.x_hat < 0.5) o.pass = false;
        }
        merge(o, Outcome{analytic_min >= 0.5, "analytic half-space members give ratio >= " + num(analytic_min)});
        return o;
    });

    report(11, "determinism of CLI output and calibration", [&] {
        Outcome o;
        const fs::path root = fs::temp_directory_path() / ("oslx-acceptance-" + std::to_string(::getpid()));
        fs::remove_all(root);
        const std::vector<std::string> commands{
            "--n 64 --seed 9 gen random-bmo --depth 5",
            "--n 64 --seed 9 --format bin --out bin gen random-bmo --depth 5",
            "--n 16 --dim 2 gen half-space",
            "--n 64 gen power-weight --a 4",
            "--n 32 gen two-valued --k 4",
            "--family all eval --input random-bmo.csv",
            "--mode zero eval --input half-space.csv --out zero",
            "--mode dyadic eval --input bin/random-bmo.bin --out dyadic",
            "--family all constants --weight power-weight.csv",
            "verify char --weight two-valued.csv",
            "--n 64 sweep --p 1..8 --input random-bmo.csv",
            "--n 64 sweep --a 0,1,2,4 --out sweep-a",
            "--calibration cal.json --out smoke verify calibrate --suite smoke",
            "--calibration cal.json --out smoke verify all --suite smoke",
        };
        std::array<std::string, 2> logs;
        for (int run = 0; run < 2; ++run) {
            const fs::path dir = root / std::to_string(run);
            fs::create_directories(dir);
            // The second run caps the thread pool to show the cap does not change output.
            const std::string env = run == 0 ? "" : "OSLX_THREADS=1";
            for (const auto& c : commands) {
                const CliRun r = cli(dir, env, c);
                logs[run] += "$ " + c + "\n" + r.out + "exit " + std::to_string(r.exit_code) + "\n";
                if (r.exit_code != 0) {
                    o.pass = false;
                    o.detail += "'" + c + "' exited " + std::to_string(r.exit_code) + "; ";
                }
            }
        }
        const auto a = tree(root / "0");
        const auto b = tree(root / "1");
        std::size_t differ = a.size() == b.size() ? 0 : 1;
        for (const auto& [name, bytes] : a) {
            auto it = b.find(name);
            if (it == b.end() || it->second != bytes) {
                ++differ;
                o.detail += "differs: " + name + "; ";
            }
        }
        if (logs[0] != logs[1]) {
            ++differ;
            o.detail += "console output differs; ";
        }
        if (differ) o.pass = false;

        // Recalibrating from the in-process suite runs reproduces the shipped constants bitwise.
        const Calibration shipped = load_calibration(OSLX_CALIBRATION_PATH);
        std::size_t constants = 0;
        std::size_t mismatched = 0;
        for (const auto& run : suite_runs()) {
            const Calibration again = calibrate(run.results);
            for (const auto& [key, entry] : again.entries) {
                const auto it = shipped.entries.find(key);
                if (it == shipped.entries.end() || it->second.corpus_hash != entry.corpus_hash) {
                    ++mismatched;
                    continue;
                }
                for (const auto& [name, value] : entry.constants) {
                    ++constants;
                    const auto c = it->second.constants.find(name);
                    if (c == it->second.constants.end() || c->second != value) {
                        ++mismatched;
                        o.detail += "constant " + key + " " + name + " changed; ";
                    }
                }
            }
        }
        if (mismatched || constants == 0) o.pass = false;
        if (o.pass) {
            o.detail = std::to_string(commands.size()) + " commands run twice, " + std::to_string(a.size()) +
                       " output files identical; " + std::to_string(constants) +
                       " calibration constants reproduced bitwise";
            fs::remove_all(root);
        }
        return o;
    });

    std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}

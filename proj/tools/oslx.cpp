// SPDX-License-Identifier: Apache-2.0
// oslx: generate grids, evaluate maximal operators and seminorms, compute
// weight constants, run the inequality checks and parameter sweeps.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oslx/calibration.hpp"
#include "oslx/corpus.hpp"
#include "oslx/error.hpp"
#include "oslx/grid_io.hpp"
#include "oslx/operators.hpp"
#include "oslx/oscillation.hpp"
#include "oslx/report.hpp"
#include "oslx/verify.hpp"

namespace fs = std::filesystem;
using namespace oslx;

namespace {

enum Exit : int { kPass = 0, kUsage = 1, kDegenerate = 2, kStale = 3, kOracle = 4, kChecksFailed = 5 };

struct Globals {
    std::string mode = "restricted";
    std::string family;  // empty: command default
    int n = 64;
    int dim = 1;
    std::uint64_t seed = 0;
    std::string out = ".";
    std::string calibration = OSLX_DEFAULT_CALIBRATION;
    bool floor = false;
    bool oracle = false;
    std::string format = "csv";
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

BoundaryMode mode_of(const Globals& g) { return parse_mode(g.mode); }

Family family_of(const Globals& g, Family fallback) { return g.family.empty() ? fallback : parse_family(g.family); }

fs::path out_path(const Globals& g, const std::string& name) { return fs::path(g.out) / name; }

void emit(const Globals& g, const std::string& name, const std::string& contents) {
    write_file(out_path(g, name), contents);
}

std::string grid_ext(const Globals& g) { return parse_format(g.format) == GridFormat::csv ? ".csv" : ".bin"; }

Weight load_weight(const std::string& path, const Globals& g) { return Weight(read_grid(path), g.floor); }

/// "1,2,4" or "1..8" (integer steps); empty text is a usage error.
std::vector<double> parse_axis(const std::string& text, const char* name) {
    if (text.empty()) throw UsageError(std::string("empty sweep axis --") + name);
    std::vector<double> out;
    auto number = [&](std::string_view s) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
            throw UsageError(std::string("bad value '") + std::string(s) + "' on axis --" + name);
        }
        return v;
    };
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const double lo = number(std::string_view(text).substr(0, dots));
        const double hi = number(std::string_view(text).substr(dots + 2));
        for (double v = lo; v <= hi; v += 1.0) out.push_back(v);
    } else {
        std::string_view rest = text;
        while (true) {
            const auto comma = rest.find(',');
            out.push_back(number(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
    }
    if (out.empty()) throw UsageError(std::string("empty sweep axis --") + name);
    return out;
}

/// "a0:side" or "a0,a1:side"; empty means the whole domain.
GridCube parse_cube(const std::string& text, int dim, int n) {
    if (text.empty()) return whole_domain(dim, n);
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw UsageError("cube must look like a0[,a1]:side");
    const auto anchor = parse_axis(text.substr(0, colon), "cube");
    const auto side = parse_axis(text.substr(colon + 1), "cube");
    if (anchor.size() != static_cast<std::size_t>(dim) || side.size() != 1) {
        throw UsageError("cube needs one anchor per axis and one side");
    }
    GridCube q{dim, {static_cast<int>(anchor[0]), dim == 2 ? static_cast<int>(anchor[1]) : 0},
               static_cast<int>(side[0])};
    if (!q.inside(n)) throw UsageError("cube must lie inside the domain");
    return q;
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
    std::string generator;
    std::map<std::string, double> params;
};

int cmd_gen(const Globals& g, const GenArgs& a) {
    GeneratorSpec spec{a.generator, g.n, g.dim, a.params, g.seed};
    const GridFormat format = parse_format(g.format);
    const std::string ext = grid_ext(g);
    const std::string stem = a.generator;
    if (a.generator == "half-space") {
        auto ex = half_space_example(g.n, g.dim, static_cast<int>(spec.param("axis", 0)),
                                     static_cast<int>(spec.param("boundary", g.n / 2)), spec.param("complement", 0) != 0);
        write_grid(out_path(g, stem + ext), ex.grid_values, format);
        write_grid(out_path(g, stem + "_mf" + ext), ex.analytic_maximal, format);
    } else {
        write_grid(out_path(g, stem + ext), generate(spec), format);
    }
    emit(g, stem + ".manifest.json", dump_json(to_json(spec)));
    return kPass;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string input;
    std::string weight;
};

bool oracle_agrees(const GridFunction& fast, const GridFunction& naive, std::string& where) {
    for (std::size_t i = 0; i < fast.size(); ++i) {
        const double a = fast[i];
        const double b = naive[i];
        const double scale = std::max(std::abs(a), std::abs(b));
        if (std::abs(a - b) > 1e-9 * scale) {
            where = "cell " + std::to_string(i) + ": fast " + format_number(a) + ", naive " + format_number(b);
            return false;
        }
    }
    return true;
}

int cmd_eval(const Globals& g, const EvalArgs& a) {
    const GridFunction f = read_grid(a.input);
    const BoundaryMode mode = mode_of(g);
    const Family family = family_of(g, Family::all);
    const auto mf = maximal(f, mode);
    const auto ms = sharp_maximal(f, mode);
    if (g.oracle) {
        std::string where;
        if (!oracle_agrees(mf.values, maximal_naive(f, mode).values, where)) {
            throw Error(ErrorCode::oracle_mismatch, "maximal function differs from the exhaustive oracle at " + where);
        }
        if (!oracle_agrees(ms.values, sharp_maximal_naive(f, mode).values, where)) {
            throw Error(ErrorCode::oracle_mismatch, "sharp maximal function differs from the exhaustive oracle at " + where);
        }
    }
    const GridFormat format = parse_format(g.format);
    write_grid(out_path(g, "mf" + grid_ext(g)), mf.values, format);
    write_grid(out_path(g, "msharp" + grid_ext(g)), ms.values, format);

    Json report{{"input", a.input},
                {"n", f.resolution()},
                {"dim", f.dim()},
                {"mode", std::string(to_string(mode))},
                {"family", std::string(to_string(family))},
                {"bmo", to_json(bmo_seminorm(f, family), mode)},
                {"blo", to_json(blo_seminorm(f, family), mode)},
                {"mf_blo", to_json(blo_seminorm(mf.values, family), mode)}};
    if (!a.weight.empty()) {
        const Weight w = load_weight(a.weight, g);
        report["mf_blo_w"] = to_json(blo_w_seminorm(mf.values, w, family), mode);
    }
    if (g.oracle) report["oracle"] = "agree";
    const std::string text = dump_json(report);
    emit(g, "report.json", text);
    std::cout << text;
    return kPass;
}

// ---------------------------------------------------------------------------
// constants

int cmd_constants(const Globals& g, const std::string& weight) {
    const Weight w = load_weight(weight, g);
    const auto c = fujii_wilson(w, mode_of(g), family_of(g, default_a_infty_family(w.resolution(), w.dim())));
    Json j = to_json(c);
    j["weight"] = weight;
    const std::string text = dump_json(j);
    emit(g, "constants.json", text);
    std::cout << text;
    return kPass;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
    std::string what = "all";
    std::string suite = "default";
    std::vector<std::string> inputs;
    std::vector<std::string> weights;
};

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == '/') c = '_';
    }
    return s;
}

void print_checks(const std::vector<Check>& checks) {
    for (const auto& c : checks) std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
}

int cmd_verify(const Globals& g, const VerifyArgs& a) {
    SuiteConfig config = suite_by_name(a.suite);
    config.mode = mode_of(g);
    if (!g.family.empty()) config.family = parse_family(g.family);
    if (g.seed != 0) config.seed = g.seed;

    if (a.what == "calibrate") {
        const auto results = run_suite(config);
        Calibration base;
        if (fs::exists(g.calibration)) base = load_calibration(g.calibration);
        const Calibration c = calibrate(results, base);
        save_calibration(g.calibration, c);
        emit(g, "calibration-run.json", dump_json(results_json(results, {})));
        for (const auto& d : results.dims) {
            std::cout << d.key << " corpus " << d.corpus_hash << '\n';
            for (const auto& [k, v] : d.observed) std::cout << "  " << k << " = " << format_number(v) << '\n';
        }
        return kPass;
    }
    if (a.what == "stability") {
        const Calibration c = load_calibration(g.calibration);
        const auto results = run_suite(doubled(config), part::all & ~part::x & ~part::goodlambda);
        const auto checks = stability_report(results, c);
        print_checks(checks);
        emit(g, "stability.json", dump_json(results_json(results, checks)));
        return kPass;  // informational
    }

    const unsigned parts = parse_part(a.what);
    const bool custom = !a.inputs.empty() || !a.weights.empty();
    SuiteResults results;
    if (custom) {
        CustomInputs in;
        for (const auto& p : a.inputs) {
            in.f_names.push_back(p);
            in.fs.push_back(read_grid(p));
        }
        for (const auto& p : a.weights) {
            in.w_names.push_back(p);
            in.ws.push_back(load_weight(p, g));
        }
        results = run_custom(config, in, parts);
    } else {
        results = run_suite(config, parts);
    }

    std::vector<Check> checks;
    if (custom && !fs::exists(g.calibration)) {
        checks = evaluate(results, Calibration{config.name, {}}, false);
    } else {
        checks = evaluate(results, load_calibration(g.calibration), !custom);
    }
    if (custom && (parts & part::chr)) {
        for (const auto& d : results.dims) {
            for (const auto& w : d.weights) {
                std::cout << "char " << w.name << " value " << format_number(w.chr->value)
                          << (w.chr->ok ? " >= 1/2" : " < 1/2") << (w.chr->complement ? " (complement side)" : "")
                          << '\n';
            }
        }
    }
    print_checks(checks);
    const std::string stem = "verify-" + a.what;
    emit(g, stem + ".json", dump_json(results_json(results, checks)));
    for (const auto& d : results.dims) {
        if (d.tail_witness) emit(g, stem + "-tail-" + sanitize(d.key) + ".csv", tail_csv(d.tail_witness->profile));
    }
    bool pass = true;
    for (const auto& c : checks) pass = pass && c.pass;
    return pass ? kPass : kChecksFailed;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
    std::optional<std::string> p;
    std::optional<std::string> a;
    std::string input;
    std::string cube;
};

int cmd_sweep(const Globals& g, const SweepArgs& s) {
    if (!s.p && !s.a) throw UsageError("sweep needs at least one axis (--p, --a)");
    const std::vector<double> ps = s.p ? parse_axis(*s.p, "p") : std::vector<double>{};
    const std::vector<double> as = s.a ? parse_axis(*s.a, "a") : std::vector<double>{};
    if (!ps.empty() && s.input.empty()) throw UsageError("the p axis needs --input");
    const BoundaryMode mode = mode_of(g);

    std::optional<GridFunction> f;
    std::optional<Fields> fields;
    if (!s.input.empty()) {
        f = read_grid(s.input);
        fields = compute_fields(*f, mode);
    }
    const int n = f ? f->resolution() : g.n;
    const int dim = f ? f->dim() : g.dim;
    const GridCube q = parse_cube(s.cube, dim, n);
    const Family family = family_of(g, default_a_infty_family(n, dim));

    std::string csv;
    csv += as.empty() ? "" : "a,";
    csv += "a1,a_infty";
    csv += ps.empty() ? "\n" : ",p,lhs,normalized\n";
    const std::vector<std::optional<double>> a_cells =
        as.empty() ? std::vector<std::optional<double>>{std::nullopt}
                   : std::vector<std::optional<double>>(as.begin(), as.end());
    for (const auto& a : a_cells) {
        // Power weight centered in the domain when the a axis is swept, w == 1 otherwise.
        const Weight w = a ? power_weight(n, dim, *a, {0.5, 0.5}) : Weight(GridFunction::constant(dim, n, 1.0));
        const auto c = fujii_wilson(w, mode, family);
        const std::string head = (a ? format_number(*a) + "," : std::string()) + format_number(c.a1.value) + "," +
                                 format_number(c.a_infty);
        if (ps.empty()) {
            csv += head + "\n";
            continue;
        }
        for (double p : ps) {
            const auto rec = thm1_ratio(*fields, w, q, p, c.a_infty, family);
            csv += head + "," + format_number(p) + "," + format_number(rec.lhs) + "," + format_number(rec.normalized) +
                   "\n";
        }
    }
    emit(g, "sweep.csv", csv);
    std::cout << csv;
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oslx: maximal operators, oscillation seminorms and weighted inequality checks on grids"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--mode", g.mode, "Boundary mode: restricted, zero or dyadic")
        ->check(CLI::IsMember({"restricted", "zero", "dyadic"}));
    app.add_option("--family", g.family, "Cube family for sup-over-cubes quantities: all or dyadic")
        ->check(CLI::IsMember({"all", "dyadic"}));
    app.add_option("--n", g.n, "Grid resolution N (power of two)");
    app.add_option("--dim", g.dim, "Dimension, 1 or 2")->check(CLI::IsMember({1, 2}));
    app.add_option("--seed", g.seed, "Seed for every random draw");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--calibration", g.calibration, "Frozen constants file");
    app.add_flag("--floor", g.floor, "Raise nonpositive weight entries to the floor instead of rejecting them");
    app.add_flag("--oracle", g.oracle, "Compare fast operators against the exhaustive oracle");
    app.add_option("--format", g.format, "Grid output format: csv or bin")->check(CLI::IsMember({"csv", "bin"}));

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a grid and its manifest");
    gen_cmd->add_option("generator", gen.generator,
                        "half-space, analytic-half-space, log-abs, power-weight, two-valued, spike, random-bmo, a1-family, "
                        "constant")
        ->required();
    std::map<std::string, double> param_values;
    for (const char* key : {"a", "k", "delta", "depth", "amplitude", "cx", "cy", "axis", "boundary", "complement",
                            "value"}) {
        gen_cmd->add_option(std::string("--") + key, param_values[key], std::string("Generator parameter ") + key);
    }

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Maximal fields and seminorm reports of a grid");
    eval_cmd->add_option("--input", eval.input, "Grid file")->required();
    eval_cmd->add_option("--weight", eval.weight, "Weight file for the weighted BLO report");

    std::string weight_path;
    auto* const_cmd = app.add_subcommand("constants", "A1 and Fujii-Wilson constants of a weight");
    const_cmd->add_option("--weight", weight_path, "Weight file")->required();

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "Run inequality checks against the frozen constants");
    verify_cmd->add_option("what", verify.what,
                           "thm1, tail, goodlambda, cp, probe, machinery, x, char, all, calibrate or stability");
    verify_cmd->add_option("--suite", verify.suite, "Corpus: default or smoke");
    verify_cmd->add_option("--input", verify.inputs, "Function grid files (instead of the suite corpus)");
    verify_cmd->add_option("--weight", verify.weights, "Weight grid files (instead of the suite corpus)");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Cartesian sweep over p and power-weight exponents");
    sweep_cmd->add_option("--p", sweep.p, "Exponents, e.g. 1,2,4 or 1..8");
    sweep_cmd->add_option("--a", sweep.a, "Power-weight exponents, e.g. 0,1,2,4");
    sweep_cmd->add_option("--input", sweep.input, "Function grid file for the p axis");
    sweep_cmd->add_option("--cube", sweep.cube, "Cube a0[,a1]:side in cells (default: whole domain)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    try {
        if (gen_cmd->parsed()) {
            for (const auto& [key, value] : param_values) {
                if (gen_cmd->count(std::string("--") + key)) gen.params[key] = value;
            }
            return cmd_gen(g, gen);
        }
        if (eval_cmd->parsed()) return cmd_eval(g, eval);
        if (const_cmd->parsed()) return cmd_constants(g, weight_path);
        if (verify_cmd->parsed()) return cmd_verify(g, verify);
        if (sweep_cmd->parsed()) return cmd_sweep(g, sweep);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        switch (e.code()) {
            case ErrorCode::degenerate_input: return kDegenerate;
            case ErrorCode::stale_calibration: return kStale;
            case ErrorCode::oracle_mismatch: return kOracle;
            default: return kUsage;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

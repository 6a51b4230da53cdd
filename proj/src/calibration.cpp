// SPDX-License-Identifier: Apache-2.0
#include "oslx/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "oslx/error.hpp"
#include "oslx/grid_io.hpp"
#include "oslx/parallel.hpp"

namespace oslx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GeneratorSpec spec(std::string generator, int n, int dim, std::map<std::string, double> params = {},
                   std::uint64_t seed = 0) {
    return GeneratorSpec{std::move(generator), n, dim, std::move(params), seed};
}

DimSuite one_dim_suite(int n, int machinery_n) {
    DimSuite s;
    s.dim = 1;
    s.n = n;
    s.machinery_n = machinery_n;
    s.x_side_divisor = 4;
    s.functions = {
        spec("random-bmo", n, 1, {{"depth", 6}, {"amplitude", 1}}, 11),
        spec("random-bmo", n, 1, {{"depth", std::log2(n)}, {"amplitude", 0.5}}, 12),
        spec("log-abs", n, 1, {{"cx", 0.37}}),
        spec("half-space", n, 1, {{"boundary", 3 * n / 8}}),
    };
    s.weights = {
        spec("constant", n, 1, {{"value", 1}}),
        spec("power-weight", n, 1, {{"a", -0.5}, {"cx", 0.5}}),
        spec("power-weight", n, 1, {{"a", 1}, {"cx", 0.3}}),
        spec("power-weight", n, 1, {{"a", 4}, {"cx", 0.5}}),
        spec("power-weight", n, 1, {{"a", 12}, {"cx", 0.35}}),
        spec("power-weight", n, 1, {{"a", -0.97}, {"cx", 0.5}}),
        spec("two-valued", n, 1, {{"k", 1000}}),
        spec("spike", n, 1, {{"k", 1e3}, {"cx", 0.5}}),
        spec("spike", n, 1, {{"k", 1e6}, {"cx", 0.5}}),
        spec("a1-family", n, 1, {{"delta", 0.5}}, 5),
    };
    return s;
}

DimSuite two_dim_suite(int n, int machinery_n) {
    DimSuite s;
    s.dim = 2;
    s.n = n;
    s.machinery_n = machinery_n;
    s.x_side_divisor = 4;
    s.functions = {
        spec("random-bmo", n, 2, {{"depth", 4}, {"amplitude", 1}}, 21),
        spec("log-abs", n, 2, {{"cx", 0.4}, {"cy", 0.55}}),
        spec("half-space", n, 2, {{"axis", 1}, {"boundary", 3 * n / 8}}),
    };
    s.weights = {
        spec("constant", n, 2, {{"value", 1}}),
        spec("power-weight", n, 2, {{"a", 2}, {"cx", 0.5}, {"cy", 0.5}}),
        spec("power-weight", n, 2, {{"a", 8}, {"cx", 0.5}, {"cy", 0.5}}),
        spec("power-weight", n, 2, {{"a", -1.95}, {"cx", 0.5}, {"cy", 0.5}}),
        spec("two-valued", n, 2, {{"k", 100}}),
        spec("spike", n, 2, {{"k", 1e3}, {"cx", 0.5}, {"cy", 0.5}}),
        spec("spike", n, 2, {{"k", 1e6}, {"cx", 0.5}, {"cy", 0.5}}),
        spec("a1-family", n, 2, {{"delta", 0.7}}, 7),
    };
    return s;
}

void rescale(DimSuite& s, int n, int machinery_n) {
    const int old = s.n;
    s.n = n;
    s.machinery_n = machinery_n;
    for (auto* list : {&s.functions, &s.weights}) {
        for (auto& g : *list) {
            g.n = n;
            // Parameters tied to the resolution scale with it.
            if (auto it = g.params.find("boundary"); it != g.params.end()) it->second = it->second * n / old;
            if (g.generator == "random-bmo") {
                if (auto it = g.params.find("depth"); it != g.params.end()) {
                    it->second = std::min(it->second, std::log2(static_cast<double>(n)));
                }
            }
        }
    }
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Weight make_weight(const GeneratorSpec& s) { return Weight(generate(s), true); }

bool upper_ok(double observed, double frozen, double margin) { return observed <= frozen * (1.0 + margin); }
bool lower_ok(double observed, double frozen, double margin) { return observed >= frozen * (1.0 - margin); }

std::string fmt(double v) { return format_number(v); }

// Results of one (f, w) pair before merging.
struct PairOut {
    std::vector<RatioRecord> thm1;
    std::size_t monotone_violations = 0;
    double linear_ratio = 0.0;
    std::vector<PairTail> tails;
    std::size_t good_lambda_checks = 0;
    std::size_t good_lambda_failures = 0;
    Json good_lambda_first_failure;
    std::vector<RatioRecord> cp;
};

struct Inputs {
    std::vector<std::string> f_names;
    std::vector<GridFunction> fs;
    std::vector<std::string> w_names;
    std::vector<Weight> ws;
};

Inputs build_inputs(const DimSuite& ds) {
    Inputs in;
    for (const auto& g : ds.functions) {
        in.f_names.push_back(describe(g));
        in.fs.push_back(generate(g));
    }
    for (const auto& g : ds.weights) {
        in.w_names.push_back(describe(g));
        in.ws.push_back(make_weight(g));
    }
    return in;
}

PairOut run_pair(const SuiteConfig& cfg, const DimSuite& ds, const Inputs& in, const std::vector<Fields>& fields,
                 const std::vector<WeightRow>& wrows, std::size_t fi, std::size_t wi, unsigned parts) {
    PairOut out;
    const std::size_t pair = fi * in.ws.size() + wi;
    const GridFunction& f = in.fs[fi];
    const Weight& w = in.ws[wi];
    const Fields& fl = fields[fi];
    const double a_infty = wrows[wi].constants.a_infty;
    Rng cube_rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(ds.dim), pair, 1}));
    const auto cubes = sweep_cubes(ds.n, ds.dim, cfg.dyadic_min_divisor, cfg.random_cubes, cube_rng);

    std::vector<double> p_sorted = cfg.p_values;
    std::sort(p_sorted.begin(), p_sorted.end());

    if (parts & part::thm1) {
        std::vector<double> sup_normalized(p_sorted.size(), 0.0);
        for (const auto& q : cubes) {
            double previous = 0.0;
            for (std::size_t k = 0; k < p_sorted.size(); ++k) {
                RatioRecord rec = thm1_ratio(fl, w, q, p_sorted[k], a_infty, cfg.family);
                rec.f_ref = in.f_names[fi];
                rec.w_ref = in.w_names[wi];
                if (k > 0 && rec.lhs < previous * (1.0 - 1e-9)) ++out.monotone_violations;
                previous = rec.lhs;
                sup_normalized[k] = std::max(sup_normalized[k], rec.normalized);
                out.thm1.push_back(std::move(rec));
            }
        }
        double hi = 0.0;
        double lo = kInf;
        for (std::size_t k = 0; k < p_sorted.size(); ++k) {
            if (p_sorted[k] > 4.0) continue;
            hi = std::max(hi, sup_normalized[k]);
            lo = std::min(lo, sup_normalized[k]);
        }
        out.linear_ratio = lo > 0.0 ? hi / lo : kInf;
    }

    if (parts & part::tail) {
        for (const auto& q : cubes) {
            PairTail t;
            t.f = in.f_names[fi];
            t.w = in.w_names[wi];
            t.cube = q;
            t.a_infty = a_infty;
            t.profile = tail_profile(fl, w, q);
            for (std::size_t i = 0; i < t.profile.mass.size(); ++i) {
                const double m = t.profile.mass[i];
                if (!(m >= 0.0 && m <= 1.0) || (i > 0 && m > t.profile.mass[i - 1])) t.monotone = false;
            }
            out.tails.push_back(std::move(t));
        }
    }

    if (parts & part::goodlambda) {
        Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(ds.dim), pair, 2}));
        for (int c = 0; c < cfg.good_lambda_checks; ++c) {
            const GridCube& q = cubes[rng.below(cubes.size())];
            const double floor = cube_min(fl.mf, q);
            const double excess = cube_max(fl.mf, q) - floor;
            double lambda = rng.uniform(0.0, 1.2) * excess;
            if (!(lambda > 0.0)) lambda = std::max(excess, 1.0) * 1e-3;
            const double gamma = std::exp(rng.uniform(std::log(0.05), std::log(20.0)));
            const GoodLambda g = good_lambda(fl, w, q, lambda, gamma);
            ++out.good_lambda_checks;
            if (!g.ok) {
                if (out.good_lambda_failures == 0) {
                    out.good_lambda_first_failure = Json{{"f", in.f_names[fi]}, {"w", in.w_names[wi]},
                                                         {"cube", to_json(q)}, {"lambda", lambda},
                                                         {"gamma", gamma}, {"mass", g.mass},
                                                         {"bound_mass", g.bound_mass}, {"inclusion", g.inclusion}};
                }
                ++out.good_lambda_failures;
            }
        }
    }

    if (parts & part::cp) {
        for (const auto& q : cubes) {
            if (cube_min(f, q) == cube_max(f, q)) continue;  // f constant on Q: outside the estimate's scope
            for (double p : p_sorted) {
                RatioRecord rec = cp_ratio(f, fl.msharp, w, q, p, a_infty, cfg.family);
                rec.f_ref = in.f_names[fi];
                rec.w_ref = in.w_names[wi];
                rec.mode = cfg.mode;
                out.cp.push_back(std::move(rec));
            }
        }
    }
    return out;
}

void run_machinery(const SuiteConfig& cfg, const DimSuite& ds, const Inputs& in, DimResults& out) {
    // Reverse Hoelder: all-cubes constants need a small grid.
    std::vector<Weight> small;
    for (const auto& g : ds.weights) {
        GeneratorSpec s = g;
        s.n = ds.machinery_n;
        small.push_back(make_weight(s));
    }
    std::vector<double> small_a(small.size());
    parallel_for(small.size(), [&](std::size_t i) {
        small_a[i] = fujii_wilson(small[i], BoundaryMode::restricted, Family::all).a_infty;
    });
    Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(ds.dim), 4}));
    const int mn = ds.machinery_n;
    for (int c = 0; c < cfg.reverse_holder_cases; ++c) {
        const std::size_t wi = static_cast<std::size_t>(c) % small.size();
        const int side = rng.between(1, mn);
        const GridCube q{ds.dim, {rng.between(0, mn - side), ds.dim == 1 ? 0 : rng.between(0, mn - side)}, side};
        const double density = rng.uniform();
        std::vector<Cell> e;
        for_each_cell(q, [&](Cell cell) {
            if (rng.uniform() < density) e.push_back(cell);
        });
        const auto check = reverse_holder_check(small[wi], q, e, small_a[wi]);
        ++out.reverse_holder_cases;
        if (!check.ok) ++out.reverse_holder_failures;
    }

    // L log L equivalence and Coifman-Rochberg weights over the dyadic sweep cubes.
    std::vector<GridCube> cubes;
    for (const auto& q : enumerate_cubes(ds.n, ds.dim, Family::dyadic)) {
        if (q.side >= std::max(1, ds.n / cfg.dyadic_min_divisor)) cubes.push_back(q);
    }
    struct WeightOut {
        double llogl_min = kInf, llogl_max = 0.0, a1_max = 0.0, v_min = kInf;
    };
    std::vector<WeightOut> per(in.ws.size());
    parallel_for(in.ws.size(), [&](std::size_t wi) {
        const Weight& w = in.ws[wi];
        WeightOut& o = per[wi];
        for (const auto& q : cubes) {
            const double r = llogl_ratio(w, q, cfg.mode).ratio;
            o.llogl_min = std::min(o.llogl_min, r);
            o.llogl_max = std::max(o.llogl_max, r);
            const GridFunction v = coifman_rochberg(w, q, cfg.mode);
            o.a1_max = std::max(o.a1_max, a1_constant(Weight(v, true), cfg.mode).value);
            const GridFunction vr =
                cfg.mode == BoundaryMode::restricted ? v : coifman_rochberg(w, q, BoundaryMode::restricted);
            o.v_min = std::min(o.v_min, cube_min(vr, q));
        }
    });
    out.llogl_min = kInf;
    out.cr_v_min = kInf;
    for (const auto& o : per) {
        out.llogl_min = std::min(out.llogl_min, o.llogl_min);
        out.llogl_max = std::max(out.llogl_max, o.llogl_max);
        out.cr_a1_max = std::max(out.cr_a1_max, o.a1_max);
        out.cr_v_min = std::min(out.cr_v_min, o.v_min);
    }

    for (int i = 0; i < cfg.gamma_samples; ++i) {
        const double p = cfg.gamma_samples == 1 ? 1.0 : 1.0 + 63.0 * i / (cfg.gamma_samples - 1);
        const auto g = gamma_growth_check(p);
        out.gamma_max = std::max(out.gamma_max, g.value);
        if (!g.ok) ++out.gamma_failures;
    }

    out.observed["llogl_lower"] = out.llogl_min;
    out.observed["llogl_upper"] = out.llogl_max;
    out.observed["a1_cr_bound"] = out.cr_a1_max;
}

bool is_unit(const Weight& w) {
    const auto v = w.function().values();
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 1.0; });
}

DimResults run_dim(const SuiteConfig& cfg, const DimSuite& ds, const Inputs& in, std::string hash, unsigned parts) {
    DimResults out;
    out.key = calibration_key(ds.dim, cfg.mode, cfg.family);
    out.corpus_hash = std::move(hash);
    out.dim = ds.dim;
    out.n = ds.n;
    out.functions = in.f_names;

    out.weights.resize(in.ws.size());
    parallel_for(in.ws.size(), [&](std::size_t wi) {
        out.weights[wi].name = in.w_names[wi];
        out.weights[wi].unit = is_unit(in.ws[wi]);
        out.weights[wi].constants = fujii_wilson(in.ws[wi], cfg.mode, cfg.family);
    });

    const unsigned field_parts = part::thm1 | part::tail | part::goodlambda | part::cp | part::probe;
    std::vector<Fields> fields;
    if (parts & field_parts) {
        std::vector<std::optional<Fields>> slots(in.fs.size());
        parallel_for(in.fs.size(), [&](std::size_t fi) { slots[fi] = compute_fields(in.fs[fi], cfg.mode); });
        for (auto& s : slots) fields.push_back(std::move(*s));
    }

    if (parts & (part::thm1 | part::tail | part::goodlambda | part::cp)) {
        const std::size_t pairs = in.fs.size() * in.ws.size();
        std::vector<PairOut> results(pairs);
        parallel_for(pairs, [&](std::size_t k) {
            results[k] = run_pair(cfg, ds, in, fields, out.weights, k / in.ws.size(), k % in.ws.size(), parts);
        });
        double thm1_max = 0.0;
        double cp_max = 0.0;
        double kappa = kInf;
        for (std::size_t k = 0; k < pairs; ++k) {
            auto& r = results[k];
            out.thm1_monotone_violations += r.monotone_violations;
            if ((parts & part::thm1) && r.linear_ratio > out.linear_p_worst) {
                out.linear_p_worst = r.linear_ratio;
                out.linear_p_witness = in.f_names[k / in.ws.size()] + " x " + in.w_names[k % in.ws.size()];
            }
            for (auto& rec : r.thm1) {
                thm1_max = std::max(thm1_max, rec.normalized);
                out.thm1.push_back(std::move(rec));
            }
            for (auto& rec : r.cp) {
                cp_max = std::max(cp_max, rec.normalized);
                out.cp.push_back(std::move(rec));
            }
            for (auto& t : r.tails) {
                if (!t.monotone) ++out.tail_monotone_violations;
                if (t.profile.fit_available) {
                    ++out.tail_fits;
                    if (!(t.profile.fitted_rate < 0.0)) ++out.tail_nonnegative_rates;
                    const double scaled = std::abs(t.profile.fitted_rate) * t.a_infty;
                    if (scaled < kappa) {
                        kappa = scaled;
                        out.tail_witness = t;
                    }
                }
                t.profile.t.clear();
                t.profile.mass.clear();
                out.tails.push_back(std::move(t));
            }
            out.good_lambda_checks += r.good_lambda_checks;
            if (r.good_lambda_failures && out.good_lambda_failures == 0) {
                out.good_lambda_first_failure = r.good_lambda_first_failure;
            }
            out.good_lambda_failures += r.good_lambda_failures;
        }
        if (parts & part::thm1) out.observed["thm1_c_star"] = thm1_max;
        if (parts & part::cp) out.observed["cp_c_star"] = cp_max;
        if ((parts & part::tail) && out.tail_fits > 0) out.observed["tail_kappa"] = kappa;
    }

    if (parts & part::probe) {
        Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(ds.dim), 3}));
        double worst = 0.0;
        for (int c = 0; c < cfg.probe_cases; ++c) {
            const std::size_t fi = static_cast<std::size_t>(c) % in.fs.size();
            const int side = rng.between(1, ds.n / 3);
            const GridCube q{ds.dim,
                             {rng.between(side, ds.n - 2 * side), ds.dim == 1 ? 0 : rng.between(side, ds.n - 2 * side)},
                             side};
            const auto probe = nonlocal_bound_probe(in.fs[fi], q, cfg.mode, fields[fi].mf, fields[fi].msharp);
            worst = std::max(worst, probe.max_ratio);
            Json witness = Json::array({probe.witness[0]});
            if (ds.dim == 2) witness.push_back(probe.witness[1]);
            out.probes.push_back(Json{{"f", in.f_names[fi]},
                                      {"cube", to_json(q)},
                                      {"max_ratio", probe.max_ratio},
                                      {"witness", witness},
                                      {"essinf_mf", probe.essinf_mf}});
            ++out.probe_cases;
        }
        out.observed["nonlocal_c"] = worst;
    }

    if (parts & part::machinery) run_machinery(cfg, ds, in, out);

    if (parts & part::x) {
        std::vector<double> bmo(in.fs.size());
        parallel_for(in.fs.size(), [&](std::size_t fi) { bmo[fi] = bmo_seminorm(in.fs[fi], Family::all).value; });
        std::vector<XMember> base;
        for (std::size_t fi = 0; fi < in.fs.size(); ++fi) {
            base.push_back(XMember{in.f_names[fi], in.fs[fi], std::nullopt, bmo[fi]});
        }
        parallel_for(in.ws.size(), [&](std::size_t wi) {
            const auto corpus = x_corpus(in.ws[wi], base, cfg.mode, ds.x_side_divisor);
            out.weights[wi].x = x_estimate(in.ws[wi], corpus, cfg.mode);
        });
        double lo = kInf;
        double hi = 0.0;
        for (const auto& row : out.weights) {
            const double r = row.x->x_hat / row.constants.a_infty;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        out.observed["x_lower"] = lo;
        out.observed["x_upper"] = hi;
    }

    if (parts & part::chr) {
        for (std::size_t wi = 0; wi < in.ws.size(); ++wi) out.weights[wi].chr = char_lower_bound(in.ws[wi]);
    }
    return out;
}

Json check_json(const Check& c) { return Json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}}; }

}  // namespace

SuiteConfig default_suite() {
    SuiteConfig c;
    c.name = "default";
    c.seed = 20240917;
    c.dims = {one_dim_suite(512, 64), two_dim_suite(64, 16)};
    return c;
}

SuiteConfig smoke_suite() {
    SuiteConfig c = default_suite();
    c.name = "smoke";
    rescale(c.dims[0], 64, 16);
    rescale(c.dims[1], 16, 8);
    c.good_lambda_checks = 10;
    c.probe_cases = 10;
    c.reverse_holder_cases = 20;
    c.gamma_samples = 8;
    return c;
}

SuiteConfig suite_by_name(std::string_view name) {
    if (name == "default") return default_suite();
    if (name == "smoke") return smoke_suite();
    throw Error(ErrorCode::validation, "unknown suite '" + std::string(name) + "' (default, smoke)");
}

SuiteConfig doubled(const SuiteConfig& config) {
    SuiteConfig c = config;
    c.name = config.name + "-doubled";
    for (auto& d : c.dims) rescale(d, 2 * d.n, d.machinery_n);
    return c;
}

std::string describe(const GeneratorSpec& s) {
    std::string out = s.generator;
    if (!s.params.empty()) {
        out += '(';
        bool first = true;
        for (const auto& [k, v] : s.params) {
            if (!first) out += ';';
            first = false;
            out += k + "=" + format_number(v);
        }
        out += ')';
    }
    if (s.seed) out += "#" + std::to_string(s.seed);
    return out;
}

Json suite_manifest(const SuiteConfig& config, const DimSuite& dim) {
    Json functions = Json::array();
    for (const auto& g : dim.functions) functions.push_back(to_json(g));
    Json weights = Json::array();
    for (const auto& g : dim.weights) weights.push_back(to_json(g));
    return Json{{"suite", config.name},
                {"seed", config.seed},
                {"mode", std::string(to_string(config.mode))},
                {"family", std::string(to_string(config.family))},
                {"p_values", config.p_values},
                {"dyadic_min_divisor", config.dyadic_min_divisor},
                {"random_cubes", config.random_cubes},
                {"good_lambda_checks", config.good_lambda_checks},
                {"probe_cases", config.probe_cases},
                {"reverse_holder_cases", config.reverse_holder_cases},
                {"gamma_samples", config.gamma_samples},
                {"dim", dim.dim},
                {"n", dim.n},
                {"machinery_n", dim.machinery_n},
                {"x_side_divisor", dim.x_side_divisor},
                {"functions", functions},
                {"weights", weights}};
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string corpus_hash(const SuiteConfig& config, const DimSuite& dim) {
    return hex64(fnv1a(dump_json(suite_manifest(config, dim), 0)));
}

std::string calibration_key(int dim, BoundaryMode mode, Family family) {
    return "d" + std::to_string(dim) + "/" + std::string(to_string(mode)) + "/" + std::string(to_string(family));
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) noexcept {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(base);
    for (std::uint64_t t : tags) h = mix(h ^ mix(t));
    return h;
}

std::vector<GridCube> sweep_cubes(int n, int dim, int min_divisor, int random_count, Rng& rng) {
    std::vector<GridCube> out;
    const int min_side = std::max(1, n / std::max(1, min_divisor));
    for (const auto& q : enumerate_cubes(n, dim, Family::dyadic)) {
        if (q.side >= min_side) out.push_back(q);
    }
    const int lo = std::max(1, n / 16);
    const int hi = std::max(1, n / 2);
    int lo_exp = 0;
    while ((1 << lo_exp) < lo) ++lo_exp;
    int hi_exp = 0;
    while ((1 << (hi_exp + 1)) <= hi) ++hi_exp;
    for (int k = 0; k < random_count; ++k) {
        const int side = 1 << rng.between(lo_exp, hi_exp);
        const int a0 = rng.between(0, n - side);
        const int a1 = dim == 1 ? 0 : rng.between(0, n - side);
        out.push_back(GridCube{dim, {a0, a1}, side});
    }
    return out;
}

std::span<const ConstantDef> constant_defs() noexcept {
    static constexpr std::array<ConstantDef, 9> defs{{
        {"thm1_c_star", "thm1", Bound::upper},
        {"cp_c_star", "cp", Bound::upper},
        {"tail_kappa", "tail", Bound::lower},
        {"x_lower", "x", Bound::lower},
        {"x_upper", "x", Bound::upper},
        {"llogl_lower", "machinery", Bound::lower},
        {"llogl_upper", "machinery", Bound::upper},
        {"a1_cr_bound", "machinery", Bound::upper},
        {"nonlocal_c", "probe", Bound::upper},
    }};
    return defs;
}

Json to_json(const Calibration& c) {
    Json entries = Json::object();
    for (const auto& [key, e] : c.entries) {
        Json constants = Json::object();
        for (const auto& [name, v] : e.constants) constants[name] = v;
        entries[key] = Json{{"corpus_hash", e.corpus_hash}, {"n", e.n}, {"constants", constants}};
    }
    return Json{{"suite", c.suite}, {"margin", kRegressionMargin}, {"entries", entries}};
}

Calibration calibration_from_json(const nlohmann::json& j) {
    try {
        Calibration c;
        c.suite = j.at("suite").get<std::string>();
        for (const auto& [key, e] : j.at("entries").items()) {
            CalibrationEntry entry;
            entry.corpus_hash = e.at("corpus_hash").get<std::string>();
            entry.n = e.at("n").get<int>();
            for (const auto& [name, v] : e.at("constants").items()) entry.constants[name] = v.get<double>();
            c.entries[key] = std::move(entry);
        }
        return c;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::parse, std::string("calibration file: ") + ex.what());
    }
}

Calibration load_calibration(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::parse, path.string() + ": " + ex.what());
    }
    return calibration_from_json(j);
}

void save_calibration(const std::filesystem::path& path, const Calibration& c) {
    write_file(path, dump_json(to_json(c)));
}

unsigned parse_part(std::string_view text) {
    if (text == "thm1") return part::thm1;
    if (text == "tail") return part::tail;
    if (text == "goodlambda") return part::goodlambda;
    if (text == "cp") return part::cp;
    if (text == "probe") return part::probe;
    if (text == "machinery") return part::machinery;
    if (text == "x") return part::x;
    if (text == "char") return part::chr;
    if (text == "all") return part::all;
    throw Error(ErrorCode::validation, "unknown criterion suite '" + std::string(text) + "'");
}

std::string_view part_name(unsigned bit) {
    switch (bit) {
        case part::thm1: return "thm1";
        case part::tail: return "tail";
        case part::goodlambda: return "goodlambda";
        case part::cp: return "cp";
        case part::probe: return "probe";
        case part::machinery: return "machinery";
        case part::x: return "x";
        case part::chr: return "char";
        default: return "all";
    }
}

SuiteResults run_suite(const SuiteConfig& config, unsigned parts) {
    if (config.dims.empty()) throw Error(ErrorCode::validation, "suite has no dimensions");
    SuiteResults out;
    out.suite = config.name;
    out.mode = config.mode;
    out.family = config.family;
    out.parts = parts;
    for (const auto& ds : config.dims) out.dims.push_back(run_dim(config, ds, build_inputs(ds), corpus_hash(config, ds), parts));
    return out;
}

SuiteResults run_custom(const SuiteConfig& config, const CustomInputs& inputs, unsigned parts) {
    if (parts & part::machinery) {
        throw Error(ErrorCode::validation, "the machinery checks run on generated suites only");
    }
    if (inputs.fs.empty() && (parts & (part::thm1 | part::tail | part::goodlambda | part::cp | part::probe | part::x))) {
        throw Error(ErrorCode::validation, "this check needs at least one input function");
    }
    if (inputs.ws.empty()) throw Error(ErrorCode::validation, "at least one weight is required");
    Inputs in{inputs.f_names, inputs.fs, inputs.w_names, inputs.ws};
    const int dim = in.ws.front().dim();
    const int n = in.ws.front().resolution();
    std::string bytes;
    for (const auto& f : in.fs) {
        if (f.dim() != dim || f.resolution() != n) throw Error(ErrorCode::validation, "inputs differ in shape");
        bytes += to_binary(f);
    }
    for (const auto& w : in.ws) {
        if (w.dim() != dim || w.resolution() != n) throw Error(ErrorCode::validation, "inputs differ in shape");
        bytes += to_binary(w.function());
    }
    DimSuite ds;
    ds.dim = dim;
    ds.n = n;
    SuiteResults out;
    out.suite = config.name;
    out.mode = config.mode;
    out.family = config.family;
    out.parts = parts;
    out.dims.push_back(run_dim(config, ds, in, "custom-" + hex64(fnv1a(bytes)), parts));
    return out;
}

Calibration calibrate(const SuiteResults& results, Calibration base) {
    if (results.parts != part::all) throw Error(ErrorCode::validation, "calibration needs a full run");
    base.suite = results.suite;
    for (const auto& d : results.dims) {
        CalibrationEntry e;
        e.corpus_hash = d.corpus_hash;
        e.n = d.n;
        e.constants = d.observed;
        base.entries[d.key] = std::move(e);
    }
    return base;
}

void require_fresh(const SuiteResults& results, const Calibration& calibration) {
    for (const auto& d : results.dims) {
        const auto it = calibration.entries.find(d.key);
        if (it == calibration.entries.end()) {
            throw Error(ErrorCode::stale_calibration, "no frozen constants for " + d.key);
        }
        if (it->second.corpus_hash != d.corpus_hash) {
            throw Error(ErrorCode::stale_calibration, d.key + ": corpus hash " + d.corpus_hash +
                                                          " does not match frozen " + it->second.corpus_hash);
        }
    }
}

namespace {

void regression_checks(const DimResults& d, const CalibrationEntry& entry, double margin, const std::string& prefix,
                       std::vector<Check>& out) {
    for (const auto& def : constant_defs()) {
        const auto obs = d.observed.find(std::string(def.name));
        if (obs == d.observed.end()) continue;
        const auto frozen = entry.constants.find(std::string(def.name));
        if (frozen == entry.constants.end()) {
            throw Error(ErrorCode::stale_calibration, d.key + ": no frozen value for " + std::string(def.name));
        }
        const bool ok = def.bound == Bound::upper ? upper_ok(obs->second, frozen->second, margin)
                                                  : lower_ok(obs->second, frozen->second, margin);
        out.push_back(Check{prefix + std::string(def.part) + "." + std::string(def.name), ok,
                            "observed " + fmt(obs->second) + (def.bound == Bound::upper ? " <= " : " >= ") +
                                "frozen " + fmt(frozen->second) + (def.bound == Bound::upper ? " * (1 + " : " * (1 - ") +
                                fmt(margin) + ")"});
    }
}

}  // namespace

std::vector<Check> evaluate(const SuiteResults& results, const Calibration& calibration, bool require_hash) {
    if (require_hash) {
        require_fresh(results, calibration);
    } else {
        // Custom inputs only need an entry when a part measured constants.
        for (const auto& d : results.dims) {
            if (!d.observed.empty() && !calibration.entries.count(d.key)) {
                throw Error(ErrorCode::stale_calibration, "no frozen constants for " + d.key);
            }
        }
    }
    std::vector<Check> out;
    const unsigned parts = results.parts;
    for (const auto& d : results.dims) {
        const std::string prefix = d.key + " ";
        if (parts & part::thm1) {
            out.push_back(Check{prefix + "thm1.monotone_p", d.thm1_monotone_violations == 0,
                                std::to_string(d.thm1_monotone_violations) + " violations over " +
                                    std::to_string(d.thm1.size()) + " records"});
            out.push_back(Check{prefix + "thm1.linear_p", d.linear_p_worst <= 4.0,
                                "worst max/min over p <= 4 = " + fmt(d.linear_p_worst) + " (" + d.linear_p_witness +
                                    "), bound 4"});
        }
        if (parts & part::tail) {
            out.push_back(Check{prefix + "tail.monotone", d.tail_monotone_violations == 0,
                                std::to_string(d.tail_monotone_violations) + " of " + std::to_string(d.tails.size()) +
                                    " profiles not monotone"});
            out.push_back(Check{prefix + "tail.negative_rate", d.tail_fits > 0 && d.tail_nonnegative_rates == 0,
                                std::to_string(d.tail_fits) + " fits, " + std::to_string(d.tail_nonnegative_rates) +
                                    " with rate >= 0"});
        }
        if (parts & part::goodlambda) {
            out.push_back(Check{prefix + "goodlambda.inclusion",
                                d.good_lambda_checks > 0 && d.good_lambda_failures == 0,
                                std::to_string(d.good_lambda_failures) + " failures in " +
                                    std::to_string(d.good_lambda_checks) + " checks"});
        }
        if (parts & part::machinery) {
            out.push_back(Check{prefix + "machinery.reverse_holder", d.reverse_holder_failures == 0,
                                std::to_string(d.reverse_holder_failures) + " failures in " +
                                    std::to_string(d.reverse_holder_cases) + " cases"});
            out.push_back(Check{prefix + "machinery.cr_v_at_least_one", d.cr_v_min >= 1.0 - 1e-12,
                                "min over cubes of min_Q v = " + fmt(d.cr_v_min)});
            out.push_back(Check{prefix + "machinery.gamma_growth", d.gamma_failures == 0,
                                "max Gamma(p+1)^(1/p)/p = " + fmt(d.gamma_max) + ", bound " + fmt(kGammaGrowthBound)});
        }
        if (parts & part::x) {
            for (const auto& w : d.weights) {
                if (!w.unit) continue;
                out.push_back(Check{prefix + "x.unit_weight_half", w.x->x_hat >= 0.5,
                                    "x_hat(w = 1) = " + fmt(w.x->x_hat) + " via " + w.x->argmax});
            }
        }
        if (parts & part::chr) {
            std::size_t bad = 0;
            double worst = kInf;
            for (const auto& w : d.weights) {
                if (!w.chr->ok) ++bad;
                worst = std::min(worst, w.chr->value);
                if (w.unit) {
                    out.push_back(Check{prefix + "char.unit_weight", std::abs(w.chr->value - 0.5) <= 1e-12,
                                        "value = " + fmt(w.chr->value)});
                }
            }
            out.push_back(Check{prefix + "char.lower_bound", bad == 0,
                                "min value " + fmt(worst) + " over " + std::to_string(d.weights.size()) + " weights"});
        }
        if (!d.observed.empty()) regression_checks(d, calibration.entries.at(d.key), kRegressionMargin, prefix, out);
    }
    return out;
}

std::vector<Check> stability_report(const SuiteResults& doubled_results, const Calibration& calibration) {
    std::vector<Check> out;
    for (const auto& d : doubled_results.dims) {
        const auto it = calibration.entries.find(d.key);
        if (it == calibration.entries.end()) {
            throw Error(ErrorCode::stale_calibration, "no frozen constants for " + d.key);
        }
        for (const auto& def : constant_defs()) {
            const auto obs = d.observed.find(std::string(def.name));
            const auto frozen = it->second.constants.find(std::string(def.name));
            if (obs == d.observed.end() || frozen == it->second.constants.end()) continue;
            const double rel = std::abs(obs->second - frozen->second) / std::abs(frozen->second);
            out.push_back(Check{d.key + " N=" + std::to_string(d.n) + " " + std::string(def.name),
                                rel <= kStabilityMargin,
                                "observed " + fmt(obs->second) + " vs frozen " + fmt(frozen->second) +
                                    ", relative change " + fmt(rel)});
        }
    }
    return out;
}

Json results_json(const SuiteResults& results, const std::vector<Check>& checks) {
    Json dims = Json::array();
    for (const auto& d : results.dims) {
        Json weights = Json::array();
        for (const auto& w : d.weights) {
            Json row{{"name", w.name}, {"constants", to_json(w.constants)}};
            if (w.x) {
                Json members = Json::array();
                for (const auto& r : w.x->rows) {
                    members.push_back(Json{{"name", r.name},
                                           {"blo_w", r.blo_w},
                                           {"bmo", r.bmo},
                                           {"ratio", r.ratio},
                                           {"analytic", r.analytic},
                                           {"witness", to_json(r.witness)}});
                }
                row["x"] = Json{{"x_hat", w.x->x_hat}, {"argmax", w.x->argmax}, {"members", members}};
            }
            if (w.chr) {
                row["char"] = Json{{"value", w.chr->value}, {"complement", w.chr->complement}, {"ok", w.chr->ok}};
            }
            weights.push_back(std::move(row));
        }
        Json thm1 = Json::array();
        for (const auto& r : d.thm1) thm1.push_back(to_json(r));
        Json cp = Json::array();
        for (const auto& r : d.cp) cp.push_back(to_json(r));
        Json tails = Json::array();
        for (const auto& t : d.tails) {
            tails.push_back(Json{{"f", t.f},
                                 {"w", t.w},
                                 {"cube", to_json(t.cube)},
                                 {"a_infty", t.a_infty},
                                 {"monotone", t.monotone},
                                 {"profile", summary_json(t.profile)}});
        }
        Json observed = Json::object();
        for (const auto& [k, v] : d.observed) observed[k] = v;
        Json dj{{"key", d.key},
                {"corpus_hash", d.corpus_hash},
                {"dim", d.dim},
                {"n", d.n},
                {"functions", d.functions},
                {"weights", weights},
                {"observed", observed}};
        if (results.parts & part::thm1) {
            dj["thm1"] = Json{{"records", thm1},
                              {"linear_p_worst", d.linear_p_worst},
                              {"linear_p_witness", d.linear_p_witness}};
        }
        if (results.parts & part::tail) {
            dj["tail"] = Json{{"profiles", tails}};
            if (d.tail_witness) {
                dj["tail"]["witness"] = Json{{"f", d.tail_witness->f},
                                             {"w", d.tail_witness->w},
                                             {"cube", to_json(d.tail_witness->cube)},
                                             {"profile", summary_json(d.tail_witness->profile)}};
            }
        }
        if (results.parts & part::goodlambda) {
            const std::size_t pairs = d.functions.size() * d.weights.size();
            dj["goodlambda"] = Json{{"pairs", pairs},
                                    {"per_pair", pairs ? d.good_lambda_checks / pairs : 0},
                                    {"checks", d.good_lambda_checks},
                                    {"failures", d.good_lambda_failures}};
            if (d.good_lambda_failures) dj["goodlambda"]["first_failure"] = d.good_lambda_first_failure;
        }
        if (results.parts & part::cp) dj["cp"] = Json{{"records", cp}};
        if (results.parts & part::probe) dj["probe"] = Json{{"cases", d.probes}};
        if (results.parts & part::machinery) {
            dj["machinery"] = Json{{"reverse_holder_cases", d.reverse_holder_cases},
                                   {"reverse_holder_failures", d.reverse_holder_failures},
                                   {"llogl_min", d.llogl_min},
                                   {"llogl_max", d.llogl_max},
                                   {"cr_a1_max", d.cr_a1_max},
                                   {"cr_v_min", d.cr_v_min},
                                   {"gamma_max", d.gamma_max},
                                   {"gamma_failures", d.gamma_failures}};
        }
        dims.push_back(std::move(dj));
    }
    Json parts = Json::array();
    for (unsigned bit = 1; bit < part::all; bit <<= 1) {
        if (results.parts & bit) parts.push_back(std::string(part_name(bit)));
    }
    Json cj = Json::array();
    bool pass = true;
    for (const auto& c : checks) {
        cj.push_back(check_json(c));
        pass = pass && c.pass;
    }
    return Json{{"suite", results.suite},
                {"mode", std::string(to_string(results.mode))},
                {"family", std::string(to_string(results.family))},
                {"parts", parts},
                {"dims", dims},
                {"checks", cj},
                {"pass", pass}};
}

}  // namespace oslx

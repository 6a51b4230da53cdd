// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <set>

#include "oslx/calibration.hpp"
#include "oslx/error.hpp"

using namespace oslx;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an oslx::Error";
    return ErrorCode::validation;
}

bool bitwise_same(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [k, v] : a) {
        const auto it = b.find(k);
        if (it == b.end() || std::memcmp(&v, &it->second, sizeof v) != 0) return false;
    }
    return true;
}

/// One smoke run shared by the tests below.
const SuiteResults& smoke_results() {
    static const SuiteResults r = run_suite(smoke_suite());
    return r;
}

}  // namespace

TEST(Hashing, Fnv1aReferenceVectors) {
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(Seeds, DerivedSeedsAreStableAndDistinct) {
    EXPECT_EQ(derive_seed(7, {1, 2}), derive_seed(7, {1, 2}));
    std::set<std::uint64_t> seen;
    for (std::uint64_t a = 0; a < 20; ++a)
        for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(20240917, {a, b}));
    EXPECT_EQ(seen.size(), 400u);
    EXPECT_NE(derive_seed(7, {1, 2}), derive_seed(7, {2, 1}));
}

TEST(Suite, NamesKeysAndDoubling) {
    EXPECT_EQ(calibration_key(2, BoundaryMode::zero_extension, Family::all), "d2/zero/all");
    EXPECT_EQ(calibration_key(1, BoundaryMode::restricted, Family::dyadic), "d1/restricted/dyadic");
    const SuiteConfig def = suite_by_name("default");
    ASSERT_EQ(def.dims.size(), 2u);
    EXPECT_EQ(def.dims[0].n, 512);
    EXPECT_EQ(def.dims[1].n, 64);
    std::size_t pairs = 0;
    for (const auto& d : def.dims) pairs += d.functions.size() * d.weights.size();
    EXPECT_GE(pairs, 20u);
    const SuiteConfig twice = doubled(def);
    EXPECT_EQ(twice.dims[0].n, 1024);
    EXPECT_EQ(twice.dims[1].n, 128);
    EXPECT_NE(corpus_hash(def, def.dims[0]), corpus_hash(twice, twice.dims[0]));
    EXPECT_EQ(code_of([] { suite_by_name("huge"); }), ErrorCode::validation);
    GeneratorSpec spec;
    spec.generator = "power-weight";
    spec.params = {{"a", 1.0}, {"cx", 0.5}};
    EXPECT_EQ(describe(spec), "power-weight(a=1;cx=0.5)");
}

TEST(Suite, HashTracksEveryManifestField) {
    const SuiteConfig base = smoke_suite();
    const std::string h = corpus_hash(base, base.dims[0]);
    EXPECT_EQ(h.size(), 16u);
    EXPECT_EQ(h, corpus_hash(smoke_suite(), smoke_suite().dims[0]));
    SuiteConfig seed = base;
    seed.seed += 1;
    EXPECT_NE(corpus_hash(seed, seed.dims[0]), h);
    SuiteConfig weight = base;
    weight.dims[0].weights[1].params["a"] += 0.125;
    EXPECT_NE(corpus_hash(weight, weight.dims[0]), h);
    SuiteConfig checks = base;
    checks.good_lambda_checks += 1;
    EXPECT_NE(corpus_hash(checks, checks.dims[0]), h);
}

TEST(Suite, SweepCubesCoverDyadicScalesAndRandomCubes) {
    Rng rng(5);
    const auto cubes = sweep_cubes(64, 1, 8, 8, rng);
    // Dyadic sides 64, 32, 16, 8: 1 + 2 + 4 + 8 cubes, then 8 random ones.
    ASSERT_EQ(cubes.size(), 15u + 8u);
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        EXPECT_TRUE(cubes[i].inside(64));
        if (i < 15) {
            EXPECT_GE(cubes[i].side, 8);
            EXPECT_EQ(cubes[i].anchor[0] % cubes[i].side, 0);
        } else {
            EXPECT_GE(cubes[i].side, 4);
            EXPECT_LE(cubes[i].side, 32);
            EXPECT_TRUE(is_power_of_two(cubes[i].side));
        }
    }
    Rng again(5);
    EXPECT_EQ(sweep_cubes(64, 1, 8, 8, again), cubes);
}

TEST(Calibration, FreezeEvaluateAndRerunBitwise) {
    const SuiteResults& r = smoke_results();
    const Calibration cal = calibrate(r);
    ASSERT_EQ(cal.entries.size(), 2u);
    for (const auto& [key, entry] : cal.entries) {
        for (const auto& def : constant_defs()) {
            ASSERT_TRUE(entry.constants.count(std::string(def.name))) << key << " " << def.name;
            EXPECT_TRUE(std::isfinite(entry.constants.at(std::string(def.name))));
        }
    }
    const auto checks = evaluate(r, cal);
    for (const auto& c : checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;

    const SuiteResults again = run_suite(smoke_suite());
    const Calibration cal2 = calibrate(again);
    for (const auto& [key, entry] : cal.entries) {
        EXPECT_EQ(cal2.entries.at(key).corpus_hash, entry.corpus_hash);
        EXPECT_TRUE(bitwise_same(cal2.entries.at(key).constants, entry.constants)) << key;
    }
    EXPECT_EQ(dump_json(results_json(r, checks)), dump_json(results_json(again, evaluate(again, cal))));
}

TEST(Calibration, RegressionMarginCatchesDrift) {
    const SuiteResults& r = smoke_results();
    Calibration cal = calibrate(r);
    auto& constants = cal.entries.begin()->second.constants;
    constants["thm1_c_star"] *= 1.0 / 1.10;  // observed now 10% above the frozen upper bound
    constants["tail_kappa"] *= 1.10;         // observed now below the frozen lower bound
    constants["cp_c_star"] *= 1.0 / 1.04;    // within the 5% margin
    std::map<std::string, bool> verdict;
    for (const auto& c : evaluate(r, cal)) verdict[c.name] = c.pass;
    const std::string prefix = cal.entries.begin()->first + " ";
    ASSERT_TRUE(verdict.count(prefix + "thm1.thm1_c_star"));
    EXPECT_FALSE(verdict[prefix + "thm1.thm1_c_star"]);
    EXPECT_FALSE(verdict[prefix + "tail.tail_kappa"]);
    EXPECT_TRUE(verdict[prefix + "cp.cp_c_star"]);
}

TEST(Calibration, StaleHashAndMissingKey) {
    const SuiteResults& r = smoke_results();
    Calibration cal = calibrate(r);
    Calibration stale = cal;
    stale.entries.begin()->second.corpus_hash = "0000000000000000";
    EXPECT_EQ(code_of([&] { require_fresh(r, stale); }), ErrorCode::stale_calibration);
    EXPECT_EQ(code_of([&] { evaluate(r, stale); }), ErrorCode::stale_calibration);
    Calibration missing = cal;
    missing.entries.erase(missing.entries.begin());
    EXPECT_EQ(code_of([&] { evaluate(r, missing); }), ErrorCode::stale_calibration);
    EXPECT_NO_THROW(require_fresh(r, cal));
}

TEST(Calibration, JsonRoundTripAndMerge) {
    const SuiteResults& r = smoke_results();
    const Calibration cal = calibrate(r);
    const auto path = std::filesystem::temp_directory_path() / "oslx_cal_test.json";
    save_calibration(path, cal);
    const Calibration back = load_calibration(path);
    EXPECT_EQ(back.suite, cal.suite);
    for (const auto& [key, entry] : cal.entries) {
        EXPECT_EQ(back.entries.at(key).corpus_hash, entry.corpus_hash);
        EXPECT_EQ(back.entries.at(key).n, entry.n);
        EXPECT_TRUE(bitwise_same(back.entries.at(key).constants, entry.constants));
    }
    std::filesystem::remove(path);

    Calibration other;
    other.suite = cal.suite;
    other.entries["d9/x/y"] = CalibrationEntry{"ffff", 4, {{"thm1_c_star", 1.0}}};
    const Calibration merged = calibrate(r, other);
    EXPECT_EQ(merged.entries.size(), cal.entries.size() + 1);
    EXPECT_EQ(code_of([&] { calibrate(run_suite(smoke_suite(), part::thm1)); }), ErrorCode::validation);
}

TEST(Calibration, StabilityReportIsInformational) {
    const SuiteResults& r = smoke_results();
    const Calibration cal = calibrate(r);
    const auto report = stability_report(r, cal);
    EXPECT_FALSE(report.empty());
    for (const auto& c : report) EXPECT_TRUE(c.pass) << c.name;  // same run: zero drift
}

TEST(Parts, ParseAndName) {
    EXPECT_EQ(parse_part("thm1"), part::thm1);
    EXPECT_EQ(parse_part("char"), part::chr);
    EXPECT_EQ(parse_part("all"), part::all);
    EXPECT_EQ(part_name(part::goodlambda), "goodlambda");
    EXPECT_EQ(code_of([] { parse_part("everything"); }), ErrorCode::validation);
}

TEST(SuiteRun, GoodLambdaCountAndCustomInputs) {
    SuiteConfig config = smoke_suite();
    const SuiteResults r = run_suite(config, part::goodlambda);
    for (const auto& d : r.dims) {
        const std::size_t pairs = d.functions.size() * d.weights.size();
        EXPECT_EQ(d.good_lambda_checks, pairs * static_cast<std::size_t>(config.good_lambda_checks));
        EXPECT_EQ(d.good_lambda_failures, 0u);
    }
    CustomInputs in;
    in.f_names = {"f"};
    in.fs = {random_dyadic_bmo(32, 1, 4, 1.0, 3)};
    in.w_names = {"w"};
    in.ws = {two_valued_weight(32, 1, 5.0)};
    const SuiteResults c = run_custom(config, in, part::thm1 | part::chr);
    ASSERT_EQ(c.dims.size(), 1u);
    EXPECT_EQ(c.dims[0].corpus_hash.rfind("custom-", 0), 0u);
    EXPECT_FALSE(c.dims[0].thm1.empty());
    EXPECT_EQ(code_of([&] { run_custom(config, in, part::machinery); }), ErrorCode::validation);
}

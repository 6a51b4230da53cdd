// SPDX-License-Identifier: Apache-2.0
#include "oslx/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "oslx/corpus.hpp"
#include "oslx/error.hpp"

namespace oslx {

namespace {

void require_same_grid(const GridFunction& a, const GridFunction& b, const char* what) {
    if (!a.same_shape(b)) throw Error(ErrorCode::validation, std::string(what) + ": grids differ in shape");
}

void require_inside(const GridCube& q, int n) {
    if (!q.inside(n)) throw Error(ErrorCode::range, "cube must lie inside the domain");
}

std::vector<double> weights_on(const Weight& w, const GridCube& q) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(q.cell_count()));
    for_each_cell(q, [&](Cell c) { out.push_back(w.function().at(c)); });
    return out;
}

std::vector<double> ratio_field(std::span<const double> numerator, const GridFunction& msharp, const GridCube& q) {
    std::vector<double> r(numerator.size());
    std::size_t k = 0;
    for_each_cell(q, [&](Cell c) {
        const double s = msharp.at(c);
        if (!(s > 0.0)) {
            throw Error(ErrorCode::degenerate_input, "sharp maximal function vanishes inside the cube");
        }
        r[k] = numerator[k] / s;
        ++k;
    });
    return r;
}

RatioRecord make_record(std::span<const double> r, const Weight& w, const GridCube& q, double p, double a_infty,
                        BoundaryMode mode, Family family) {
    if (!(p >= 1.0)) throw Error(ErrorCode::validation, "p must be at least 1");
    if (!(a_infty > 0.0)) throw Error(ErrorCode::validation, "A-infinity constant must be positive");
    RatioRecord rec;
    rec.lhs = weighted_power_mean(r, w, q, p);
    rec.p = p;
    rec.a_infty = a_infty;
    rec.normalized = rec.lhs / (p * a_infty);
    rec.cube = q;
    rec.mode = mode;
    rec.family = family;
    return rec;
}

}  // namespace

Fields compute_fields(const GridFunction& f, BoundaryMode mode) {
    if (is_constant(f)) throw Error(ErrorCode::degenerate_input, "constant input has no oscillation");
    return Fields{maximal(f, mode).values, sharp_maximal(f, mode).values, mode};
}

std::vector<double> oscillation_ratio(const GridFunction& mf, const GridFunction& msharp, const GridCube& q) {
    require_same_grid(mf, msharp, "oscillation ratio");
    require_inside(q, mf.resolution());
    const double floor = cube_min(mf, q);
    std::vector<double> numerator;
    numerator.reserve(static_cast<std::size_t>(q.cell_count()));
    for_each_cell(q, [&](Cell c) { numerator.push_back(mf.at(c) - floor); });
    return ratio_field(numerator, msharp, q);
}

double weighted_power_mean(std::span<const double> values, const Weight& w, const GridCube& q, double p) {
    require_inside(q, w.resolution());
    if (values.size() != static_cast<std::size_t>(q.cell_count())) {
        throw Error(ErrorCode::validation, "one value per cell of the cube expected");
    }
    const auto wq = weights_on(w, q);
    double top = 0.0;
    for (double v : values) {
        if (!(v >= 0.0)) throw Error(ErrorCode::validation, "power means need nonnegative values");
        top = std::max(top, v);
    }
    if (top == 0.0) return 0.0;
    // Scaling by the maximum keeps every term in [0, 1].
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        num += std::pow(values[k] / top, p) * wq[k];
        den += wq[k];
    }
    return top * std::pow(num / den, 1.0 / p);
}

RatioRecord thm1_ratio(const Fields& fields, const Weight& w, const GridCube& q, double p, double a_infty,
                       Family family) {
    require_same_grid(fields.mf, w.function(), "thm1 ratio");
    const auto r = oscillation_ratio(fields.mf, fields.msharp, q);
    return make_record(r, w, q, p, a_infty, fields.mode, family);
}

RatioRecord thm1_ratio(const GridFunction& f, const Weight& w, const GridCube& q, double p, BoundaryMode mode) {
    const Fields fields = compute_fields(f, mode);
    const Family family = default_a_infty_family(f.resolution(), f.dim());
    return thm1_ratio(fields, w, q, p, fujii_wilson(w, mode, family).a_infty, family);
}

RatioRecord cp_ratio(const GridFunction& f, const GridFunction& msharp, const Weight& w, const GridCube& q, double p,
                     double a_infty, Family family) {
    require_same_grid(f, msharp, "cp ratio");
    require_same_grid(f, w.function(), "cp ratio");
    require_inside(q, f.resolution());
    if (cube_min(f, q) == cube_max(f, q)) {
        throw Error(ErrorCode::degenerate_input, "input is constant on the cube");
    }
    const auto local = local_maximal(f, q);
    const auto r = ratio_field(local, msharp, q);
    return make_record(r, w, q, p, a_infty, BoundaryMode::dyadic, family);
}

RatioRecord cp_ratio(const GridFunction& f, const Weight& w, const GridCube& q, double p) {
    require_inside(q, f.resolution());
    if (cube_min(f, q) == cube_max(f, q)) {
        throw Error(ErrorCode::degenerate_input, "input is constant on the cube");
    }
    const auto msharp = sharp_maximal(f, BoundaryMode::restricted).values;
    const Family family = default_a_infty_family(f.resolution(), f.dim());
    return cp_ratio(f, msharp, w, q, p, fujii_wilson(w, BoundaryMode::restricted, family).a_infty, family);
}

std::vector<double> default_t_grid(std::span<const double> ratio) {
    std::vector<double> t{0.0};
    std::vector<double> positive;
    for (double r : ratio) {
        if (r > 0.0) positive.push_back(r);
    }
    std::sort(positive.begin(), positive.end());
    positive.erase(std::unique(positive.begin(), positive.end()), positive.end());
    t.insert(t.end(), positive.begin(), positive.end());
    return t;
}

TailProfile tail_profile(std::span<const double> ratio, const Weight& w, const GridCube& q,
                         std::optional<std::vector<double>> t_grid) {
    require_inside(q, w.resolution());
    if (ratio.size() != static_cast<std::size_t>(q.cell_count())) {
        throw Error(ErrorCode::validation, "one ratio value per cell of the cube expected");
    }
    TailProfile out;
    out.t = t_grid ? std::move(*t_grid) : default_t_grid(ratio);
    for (std::size_t i = 1; i < out.t.size(); ++i) {
        if (!(out.t[i] > out.t[i - 1])) throw Error(ErrorCode::validation, "t grid must be strictly ascending");
    }

    // Cells sorted by ratio; suffix sums of weight give w({r > t}). Suffix sums
    // only ever add nonnegative terms, so mass is nonincreasing exactly.
    const auto wq = weights_on(w, q);
    std::vector<std::size_t> order(ratio.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ratio[a] < ratio[b]; });
    std::vector<double> sorted(order.size());
    std::vector<double> suffix(order.size() + 1, 0.0);
    for (std::size_t k = 0; k < order.size(); ++k) sorted[k] = ratio[order[k]];
    for (std::size_t k = order.size(); k-- > 0;) suffix[k] = suffix[k + 1] + wq[order[k]];
    const double total = suffix[0];

    out.mass.reserve(out.t.size());
    for (double t : out.t) {
        const auto idx = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
        out.mass.push_back(suffix[idx] / total);
    }

    // Least squares of log(mass) against t inside the fit window.
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < out.t.size(); ++i) {
        const double m = out.mass[i];
        if (m >= kTailFitLow && m <= kTailFitHigh) {
            xs.push_back(out.t[i]);
            ys.push_back(std::log(m));
        }
    }
    out.fit_samples = xs.size();
    if (xs.size() >= 3) {
        const double n = static_cast<double>(xs.size());
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
        double sxx = 0.0;
        double sxy = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
        }
        if (sxx > 0.0) {
            out.fitted_rate = sxy / sxx;
            out.fitted_intercept = my - out.fitted_rate * mx;
            out.fit_available = true;
        }
    }
    return out;
}

TailProfile tail_profile(const Fields& fields, const Weight& w, const GridCube& q,
                         std::optional<std::vector<double>> t_grid) {
    require_same_grid(fields.mf, w.function(), "tail profile");
    return tail_profile(oscillation_ratio(fields.mf, fields.msharp, q), w, q, std::move(t_grid));
}

GoodLambda good_lambda(const Fields& fields, const Weight& w, const GridCube& q, double lambda, double gamma) {
    if (!(lambda > 0.0) || !(gamma > 0.0)) throw Error(ErrorCode::validation, "lambda and gamma must be positive");
    require_same_grid(fields.mf, w.function(), "good lambda");
    const auto r = oscillation_ratio(fields.mf, fields.msharp, q);
    const double floor = cube_min(fields.mf, q);
    const double threshold = 1.0 / gamma;

    double total = 0.0;
    double in_set = 0.0;
    double in_bound = 0.0;
    bool inclusion = true;
    std::size_t k = 0;
    for_each_cell(q, [&](Cell c) {
        const double wc = w.function().at(c);
        total += wc;
        const bool above = r[k] > threshold;
        if (above) in_bound += wc;
        if (fields.mf.at(c) - floor > lambda && fields.msharp.at(c) <= gamma * lambda) {
            in_set += wc;
            inclusion = inclusion && above;
        }
        ++k;
    });
    GoodLambda out;
    out.mass = in_set / total;
    out.bound_mass = in_bound / total;
    out.inclusion = inclusion;
    out.ok = inclusion && out.mass <= out.bound_mass + 1e-12;
    return out;
}

LayerCake layer_cake_lp(const TailProfile& profile, double p) {
    if (!(p >= 1.0)) throw Error(ErrorCode::validation, "p must be at least 1");
    if (profile.t.size() != profile.mass.size()) throw Error(ErrorCode::validation, "malformed tail profile");
    LayerCake out;
    if (profile.t.empty()) return out;
    const double inf = std::numeric_limits<double>::infinity();
    auto tp = [p](double t) { return std::pow(t, p); };
    auto density = [p](double t) { return p * std::pow(t, p - 1.0); };

    double integral = 0.0;
    double error = 0.0;
    // [0, t_0]: the mass there lies between mass(t_0) and 1.
    const double t0 = profile.t.front();
    if (t0 > 0.0) {
        const double lo = profile.mass.front() * tp(t0);
        const double hi = tp(t0);
        const double trap = 0.5 * t0 * density(t0) * profile.mass.front();
        integral += trap;
        error += std::max(std::abs(trap - lo), std::abs(trap - hi));
    }
    for (std::size_t i = 0; i + 1 < profile.t.size(); ++i) {
        const double a = profile.t[i];
        const double b = profile.t[i + 1];
        const double ma = profile.mass[i];
        const double mb = profile.mass[i + 1];
        const double trap = 0.5 * (b - a) * (density(a) * ma + density(b) * mb);
        // mass is nonincreasing, so the exact panel integral lies in
        // [m(b) (b^p - a^p), m(a) (b^p - a^p)].
        const double span = tp(b) - tp(a);
        integral += trap;
        error += std::max(std::abs(trap - mb * span), std::abs(trap - ma * span));
    }
    if (profile.mass.back() > 0.0) error = inf;  // mass beyond the last sample is unknown
    out.value = std::pow(integral, 1.0 / p);
    out.error_bound = error;
    return out;
}

GammaGrowth gamma_growth_check(double p) {
    if (!(p >= 1.0)) throw Error(ErrorCode::validation, "p must be at least 1");
    GammaGrowth out;
    out.value = std::exp(std::lgamma(p + 1.0) / p) / p;
    out.ok = out.value <= kGammaGrowthBound;
    return out;
}

XEstimate x_estimate(const Weight& w, std::span<const XMember> corpus, BoundaryMode mode) {
    if (corpus.empty()) throw Error(ErrorCode::validation, "x estimate needs a nonempty corpus");
    XEstimate out;
    out.x_hat = -1.0;
    for (const auto& member : corpus) {
        require_same_grid(member.f, w.function(), "x estimate");
        if (is_constant(member.f)) {
            throw Error(ErrorCode::degenerate_input, "corpus member '" + member.name + "' is constant");
        }
        XRow row;
        row.name = member.name;
        row.analytic = member.analytic_mf.has_value();
        const GridFunction mf = row.analytic ? *member.analytic_mf : maximal(member.f, mode).values;
        const auto blo = blo_w_seminorm(mf, w, Family::all);
        row.blo_w = blo.value;
        row.witness = blo.witness;
        row.bmo = member.bmo ? *member.bmo : bmo_seminorm(member.f, Family::all).value;
        row.ratio = row.blo_w / row.bmo;
        if (row.ratio > out.x_hat) {
            out.x_hat = row.ratio;
            out.argmax = row.name;
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::vector<XMember> x_corpus(const Weight& w, std::span<const XMember> base, BoundaryMode mode, int side_divisor) {
    if (side_divisor < 1) throw Error(ErrorCode::validation, "side divisor must be positive");
    const int n = w.resolution();
    const int dim = w.dim();
    std::vector<XMember> out(base.begin(), base.end());
    for (int axis = 0; axis < dim; ++axis) {
        for (bool complement : {false, true}) {
            auto ex = half_space_example(n, dim, axis, n / 2, complement);
            out.push_back(XMember{"half-space/axis" + std::to_string(axis) + (complement ? "/lower" : "/upper"),
                                  std::move(ex.grid_values), std::move(ex.analytic_maximal), std::nullopt});
        }
    }
    const int min_side = std::max(1, n / side_divisor);
    for (const auto& q : enumerate_cubes(n, dim, Family::dyadic)) {
        if (q.side < min_side) continue;
        GridFunction b = log_plus_transform(coifman_rochberg(w, q, mode));
        if (is_constant(b)) continue;
        std::string name = "cr-log/side" + std::to_string(q.side) + "/at" + std::to_string(q.anchor[0]);
        if (dim == 2) name += "," + std::to_string(q.anchor[1]);
        out.push_back(XMember{std::move(name), std::move(b), std::nullopt, std::nullopt});
    }
    return out;
}

CharLowerBound char_lower_bound(const Weight& w) {
    const int n = w.resolution();
    if (n < 2) throw Error(ErrorCode::validation, "a straddling cube needs N >= 2");
    const GridFunction& wf = w.function();
    double upper = 0.0;
    double lower = 0.0;
    for (std::size_t i = 0; i < wf.size(); ++i) {
        (wf.cell(i)[0] >= n / 2 ? upper : lower) += wf[i];
    }
    CharLowerBound out;
    out.complement = lower > upper;
    out.value = std::max(upper, lower) / (upper + lower);
    out.ok = out.value >= 0.5 - 1e-12;
    return out;
}

}  // namespace oslx

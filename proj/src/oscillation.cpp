// SPDX-License-Identifier: Apache-2.0
#include "oslx/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "oslx/error.hpp"
#include "oslx/sliding_window.hpp"

namespace oslx {

std::string_view to_string(Family family) noexcept { return family == Family::dyadic ? "dyadic" : "all"; }

Family parse_family(std::string_view text) {
    if (text == "all") return Family::all;
    if (text == "dyadic") return Family::dyadic;
    throw Error(ErrorCode::validation, "unknown cube family '" + std::string(text) + "'");
}

namespace {

void require_cube(const GridFunction& f, const GridCube& q) {
    if (q.dim != f.dim() || !q.inside(f.resolution())) throw Error(ErrorCode::range, "cube outside grid");
}

// The oscillation functionals are shift invariant; working with f - f[0]
// makes them vanish exactly on constant windows.
GridFunction shifted(const GridFunction& f) {
    const double ref = f[0];
    return f.map([ref](double v) { return v - ref; });
}

double abs_deviation_sum(const GridFunction& f, const GridCube& q, double mean) {
    double acc = 0.0;
    const auto v = f.values();
    const int n = f.resolution();
    if (f.dim() == 1) {
        for (int i = q.anchor[0]; i < q.anchor[0] + q.side; ++i) acc += std::abs(v[i] - mean);
        return acc;
    }
    for (int i = q.anchor[0]; i < q.anchor[0] + q.side; ++i) {
        const double* row = v.data() + static_cast<std::size_t>(i) * n;
        for (int j = q.anchor[1]; j < q.anchor[1] + q.side; ++j) acc += std::abs(row[j] - mean);
    }
    return acc;
}

Cell upper(const GridCube& q) { return {q.anchor[0] + q.side, q.anchor[1] + q.side}; }

// Visits the family's cubes in enumeration order (ascending side, then
// lexicographic anchor) as visit(q).
template <typename Visit>
void for_each_family_cube(int n, int dim, Family family, Visit&& visit) {
    for (int side = 1; side <= n; ++side) {
        if (family == Family::dyadic && !is_power_of_two(side)) continue;
        const int step = family == Family::dyadic ? side : 1;
        for (int a0 = 0; a0 + side <= n; a0 += step) {
            if (dim == 1) {
                visit(GridCube{1, {a0, 0}, side});
                continue;
            }
            for (int a1 = 0; a1 + side <= n; a1 += step) visit(GridCube{2, {a0, a1}, side});
        }
    }
}

// Minimum of f over every in-domain window of the given side, indexed by
// anchor (row-major over (N - side + 1)^dim anchors).
std::vector<double> window_minima(const GridFunction& f, int side) {
    const int n = f.resolution();
    const int m = n - side + 1;
    const auto v = f.values();
    if (f.dim() == 1) return running_min(v, side);
    std::vector<double> rows(static_cast<std::size_t>(n) * m);
    for (int i = 0; i < n; ++i) {
        const auto r = running_min(v.subspan(static_cast<std::size_t>(i) * n, n), side);
        std::copy(r.begin(), r.end(), rows.begin() + static_cast<std::ptrdiff_t>(i) * m);
    }
    std::vector<double> out(static_cast<std::size_t>(m) * m);
    std::vector<double> col(n);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n; ++i) col[i] = rows[static_cast<std::size_t>(i) * m + j];
        const auto c = running_min(col, side);
        for (int i = 0; i < m; ++i) out[static_cast<std::size_t>(i) * m + j] = c[i];
    }
    return out;
}

class ReportBuilder {
public:
    explicit ReportBuilder(Family family) { report_.family = family; report_.value = -1.0; }
    void offer(const GridCube& q, double value) {
        if (value > report_.value) {
            report_.value = value;
            report_.witness = q;
        }
    }
    SeminormReport done() {
        report_.value = std::max(report_.value, 0.0);
        return report_;
    }

private:
    SeminormReport report_;
};

// Sup over the family of (sum_Q s w / w(Q)) - min_Q s, with s = f - f[0] and
// the weight sums supplied by `weight_table` (nullptr means w = 1).
SeminormReport lower_oscillation_sup(const GridFunction& f, const GridFunction* weight, Family family) {
    const GridFunction s = shifted(f);
    const int n = f.resolution();
    const int dim = f.dim();
    const PrefixTable num(weight ? GridFunction(dim, n, [&] {
        std::vector<double> p(s.size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = s[i] * (*weight)[i];
        return p;
    }())
                                 : s);
    const std::optional<PrefixTable> den = weight ? std::optional<PrefixTable>(PrefixTable(*weight)) : std::nullopt;

    ReportBuilder report(family);
    auto value = [&](const GridCube& q, double minimum) {
        const double top = num.box_sum(q.anchor, upper(q));
        const double bottom = den ? den->box_sum(q.anchor, upper(q)) : static_cast<double>(q.cell_count());
        return top / bottom - minimum;
    };
    if (family == Family::dyadic) {
        for_each_family_cube(n, dim, family, [&](const GridCube& q) { report.offer(q, value(q, cube_min(s, q))); });
        return report.done();
    }
    for (int side = 1; side <= n; ++side) {
        const auto minima = window_minima(s, side);
        const int m = n - side + 1;
        for (int a0 = 0; a0 < m; ++a0) {
            if (dim == 1) {
                report.offer(GridCube{1, {a0, 0}, side}, value(GridCube{1, {a0, 0}, side}, minima[a0]));
                continue;
            }
            for (int a1 = 0; a1 < m; ++a1) {
                const GridCube q{2, {a0, a1}, side};
                report.offer(q, value(q, minima[static_cast<std::size_t>(a0) * m + a1]));
            }
        }
    }
    return report.done();
}

}  // namespace

double mean_oscillation(const GridFunction& f, const GridCube& q) {
    require_cube(f, q);
    const GridFunction s = shifted(f);
    double sum = 0.0;
    for_each_cell(q, [&](Cell c) { sum += s.at(c); });
    const double count = static_cast<double>(q.cell_count());
    return abs_deviation_sum(s, q, sum / count) / count;
}

double lower_oscillation(const GridFunction& f, const GridCube& q) {
    require_cube(f, q);
    const GridFunction s = shifted(f);
    const double minimum = cube_min(s, q);
    double sum = 0.0;
    for_each_cell(q, [&](Cell c) { sum += s.at(c) - minimum; });
    return sum / static_cast<double>(q.cell_count());
}

double weighted_lower_oscillation(const GridFunction& f, const Weight& w, const GridCube& q) {
    require_cube(f, q);
    if (!f.same_shape(w.function())) throw Error(ErrorCode::validation, "f and w live on different grids");
    const double minimum = cube_min(f, q);
    double top = 0.0;
    double bottom = 0.0;
    for_each_cell(q, [&](Cell c) {
        top += (f.at(c) - minimum) * w.function().at(c);
        bottom += w.function().at(c);
    });
    return top / bottom;
}

SeminormReport bmo_seminorm(const GridFunction& f, Family family) {
    const GridFunction s = shifted(f);
    const PrefixTable table(s);
    ReportBuilder report(family);
    for_each_family_cube(f.resolution(), f.dim(), family, [&](const GridCube& q) {
        const double count = static_cast<double>(q.cell_count());
        const double mean = table.box_sum(q.anchor, upper(q)) / count;
        report.offer(q, abs_deviation_sum(s, q, mean) / count);
    });
    return report.done();
}

SeminormReport blo_seminorm(const GridFunction& f, Family family) { return lower_oscillation_sup(f, nullptr, family); }

SeminormReport blo_w_seminorm(const GridFunction& f, const Weight& w, Family family) {
    if (!f.same_shape(w.function())) throw Error(ErrorCode::validation, "f and w live on different grids");
    return lower_oscillation_sup(f, &w.function(), family);
}

A1Report a1_constant(const Weight& w, BoundaryMode mode) {
    const auto mw = maximal(w.function(), mode);
    A1Report report;
    report.value = -1.0;
    for (std::size_t i = 0; i < w.function().size(); ++i) {
        const double ratio = mw.values[i] / w[i];
        if (ratio > report.value) {
            report.value = ratio;
            report.witness = w.function().cell(i);
        }
    }
    report.finite = std::isfinite(report.value);
    return report;
}

double fujii_wilson_cube(const Weight& w, const GridCube& q, BoundaryMode mode) {
    const auto local = maximal_of_restriction(w.function(), q, mode);
    double top = 0.0;
    for (double v : local) top += v;
    double bottom = 0.0;
    for_each_cell(q, [&](Cell c) { bottom += w.function().at(c); });
    return top / bottom;
}

Family default_a_infty_family(int n, int dim) noexcept {
    return n > (dim == 1 ? 128 : 16) ? Family::dyadic : Family::all;
}

WeightConstants fujii_wilson(const Weight& w, BoundaryMode mode, Family family) {
    WeightConstants out;
    out.mode = mode;
    out.family = family;
    out.a1 = a1_constant(w, mode);
    const PrefixTable table(w.function());
    double best = -1.0;
    for_each_family_cube(w.resolution(), w.dim(), family, [&](const GridCube& q) {
        const auto local = maximal_of_restriction(w.function(), q, mode);
        double top = 0.0;
        for (double v : local) top += v;
        const double value = top / table.box_sum(q.anchor, upper(q));
        if (value > best) {
            best = value;
            out.a_infty_witness = q;
        }
    });
    out.a_infty = best;
    return out;
}

GridFunction coifman_rochberg(const Weight& w, const GridCube& q, BoundaryMode mode) {
    const GridFunction& wf = w.function();
    require_cube(wf, q);
    double sum = 0.0;
    for_each_cell(q, [&](Cell c) { sum += wf.at(c); });
    const double mean = sum / static_cast<double>(q.cell_count());
    std::vector<double> masked(wf.size(), 0.0);
    for_each_cell(q, [&](Cell c) { masked[wf.index(c)] = wf.at(c) / mean; });
    const auto m = maximal(GridFunction(wf.dim(), wf.resolution(), std::move(masked)), mode);
    return m.values.map([](double v) { return std::sqrt(v); });
}

GridFunction log_plus_transform(const GridFunction& f) {
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(f[i] > 0.0)) throw Error(ErrorCode::domain, "log+ of nonpositive value at cell " + std::to_string(i));
    }
    return f.map([](double v) { return std::max(0.0, std::log(v)); });
}

GridFunction log_plus_transform(const Weight& w) { return log_plus_transform(w.function()); }

Weight exp_weight(const GridFunction& f, double alpha) {
    return Weight(f.map([alpha](double v) { return std::exp(alpha * v); }), true);
}

ReverseHolderCheck reverse_holder_check(const Weight& w, const GridCube& q, std::span<const Cell> e,
                                        double a_infty) {
    require_cube(w.function(), q);
    std::set<Cell> cells;
    for (const Cell& c : e) {
        Cell key = c;
        if (q.dim == 1) key[1] = 0;
        if (!q.contains(key)) throw Error(ErrorCode::containment, "E is not contained in Q");
        cells.insert(key);
    }
    double we = 0.0;
    for (const Cell& c : cells) we += w.function().at(c);
    double wq = 0.0;
    for_each_cell(q, [&](Cell c) { wq += w.function().at(c); });

    ReverseHolderCheck out;
    out.lhs = we / wq;
    if (cells.empty()) {
        out.rhs = 0.0;
    } else {
        const double fraction = static_cast<double>(cells.size()) / static_cast<double>(q.cell_count());
        const double exponent = 1.0 / (std::ldexp(1.0, q.dim + 1) * a_infty);
        out.rhs = 2.0 * std::pow(fraction, exponent);
    }
    out.ok = out.lhs <= out.rhs + 1e-12;
    return out;
}

ReverseHolderCheck reverse_holder_check(const Weight& w, const GridCube& q, std::span<const Cell> e) {
    const auto constants = fujii_wilson(w, BoundaryMode::restricted, Family::all);
    return reverse_holder_check(w, q, e, constants.a_infty);
}

LLogLRatio llogl_ratio(const Weight& w, const GridCube& q, BoundaryMode mode) {
    const GridFunction& wf = w.function();
    require_cube(wf, q);
    const auto local = maximal_of_restriction(wf, q, mode);
    const double count = static_cast<double>(q.cell_count());
    double lhs = 0.0;
    for (double v : local) lhs += v;
    double sum = 0.0;
    for_each_cell(q, [&](Cell c) { sum += wf.at(c); });
    const double mean = sum / count;
    double rhs = 0.0;
    for_each_cell(q, [&](Cell c) {
        const double v = wf.at(c);
        rhs += (1.0 + std::max(0.0, std::log(v / mean))) * v;
    });
    LLogLRatio out;
    out.lhs = lhs / count;
    out.rhs = rhs / count;
    out.ratio = out.lhs / out.rhs;
    return out;
}

}  // namespace oslx

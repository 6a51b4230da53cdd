// SPDX-License-Identifier: Apache-2.0
#include "oslx/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "oslx/error.hpp"
#include "oslx/sliding_window.hpp"

namespace oslx {

std::string_view to_string(BoundaryMode mode) noexcept {
    switch (mode) {
        case BoundaryMode::restricted: return "restricted";
        case BoundaryMode::zero_extension: return "zero";
        case BoundaryMode::dyadic: return "dyadic";
    }
    return "restricted";
}

std::string_view to_string(MaximalKind kind) noexcept {
    return kind == MaximalKind::sharp ? "sharp" : "hardy_littlewood";
}

BoundaryMode parse_mode(std::string_view text) {
    if (text == "restricted") return BoundaryMode::restricted;
    if (text == "zero" || text == "zero_extension") return BoundaryMode::zero_extension;
    if (text == "dyadic") return BoundaryMode::dyadic;
    throw Error(ErrorCode::validation, "unknown boundary mode '" + std::string(text) + "'");
}

bool is_constant(const GridFunction& f) noexcept {
    const auto v = f.values();
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
}

GridFunction restrict_to(const GridFunction& f, const GridCube& q) {
    if (!q.inside(f.resolution())) throw Error(ErrorCode::range, "cube outside grid");
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(q.cell_count()));
    for_each_cell(q, [&](Cell c) { v.push_back(f.at(c)); });
    return GridFunction(f.dim(), q.side, std::move(v));
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Span1 {
    int lo;  // inclusive
    int hi;  // inclusive
};

int side_cap_for(const GridFunction& f, const MaximalOptions& options) {
    return options.side_cap > 0 ? options.side_cap : 3 * f.resolution();
}

double volume_cells(int dim, int side) {
    const double s = side;
    return dim == 1 ? s : s * s;
}

// For one side length: evaluates window(a0, a1) on every anchor in the
// anchor box and folds, into best, the max over anchors whose cube covers each
// target cell. Targets are [t.lo, t.hi] per axis; best is row-major over them.
template <typename Window>
void fold_side(int dim, int side, std::array<Span1, 2> anchors, std::array<Span1, 2> targets, Window&& window,
               std::vector<double>& best, SlidingMax& slider) {
    const int m0 = anchors[0].hi - anchors[0].lo + 1;
    const int t0 = targets[0].hi - targets[0].lo + 1;
    auto first = [side](int lo, int tlo) {
        return [=](std::size_t k) {
            return static_cast<std::ptrdiff_t>(std::max(lo, tlo + static_cast<int>(k) - side + 1) - lo);
        };
    };
    auto last = [](int lo, int hi, int tlo) {
        return [=](std::size_t k) { return static_cast<std::ptrdiff_t>(std::min(hi, tlo + static_cast<int>(k)) - lo); };
    };

    if (dim == 1) {
        std::vector<double> w(m0);
        for (int a = 0; a < m0; ++a) w[a] = window(anchors[0].lo + a, 0);
        std::vector<double> out(t0);
        slider.run(w, first(anchors[0].lo, targets[0].lo), last(anchors[0].lo, anchors[0].hi, targets[0].lo), out);
        for (int x = 0; x < t0; ++x) best[x] = std::max(best[x], out[x]);
        return;
    }

    const int m1 = anchors[1].hi - anchors[1].lo + 1;
    const int t1 = targets[1].hi - targets[1].lo + 1;
    // Row pass: rows[a0][x1] = max over admissible a1 of window(a0, a1).
    std::vector<double> w(m1);
    std::vector<double> rows(static_cast<std::size_t>(m0) * t1);
    for (int a0 = 0; a0 < m0; ++a0) {
        for (int a1 = 0; a1 < m1; ++a1) w[a1] = window(anchors[0].lo + a0, anchors[1].lo + a1);
        slider.run(w, first(anchors[1].lo, targets[1].lo), last(anchors[1].lo, anchors[1].hi, targets[1].lo),
                   std::span<double>(rows.data() + static_cast<std::size_t>(a0) * t1, t1));
    }
    // Column pass over a0.
    std::vector<double> col(m0);
    std::vector<double> out(t0);
    for (int x1 = 0; x1 < t1; ++x1) {
        for (int a0 = 0; a0 < m0; ++a0) col[a0] = rows[static_cast<std::size_t>(a0) * t1 + x1];
        slider.run(col, first(anchors[0].lo, targets[0].lo), last(anchors[0].lo, anchors[0].hi, targets[0].lo), out);
        for (int x0 = 0; x0 < t0; ++x0) {
            double& b = best[static_cast<std::size_t>(x0) * t1 + x1];
            b = std::max(b, out[x0]);
        }
    }
}

// Mean oscillation of f (zero outside the domain) over the cube of the given
// side anchored at (a0, a1), with the mean supplied by the caller.
double oscillation_direct(const GridFunction& f, int side, int a0, int a1, double mean) {
    const int n = f.resolution();
    const auto v = f.values();
    const int lo0 = std::max(a0, 0);
    const int hi0 = std::min(a0 + side, n);
    double acc = 0.0;
    std::int64_t covered = 0;
    if (f.dim() == 1) {
        for (int i = lo0; i < hi0; ++i) acc += std::abs(v[i] - mean);
        covered = hi0 - lo0;
    } else {
        const int lo1 = std::max(a1, 0);
        const int hi1 = std::min(a1 + side, n);
        for (int i = lo0; i < hi0; ++i) {
            const double* row = v.data() + static_cast<std::size_t>(i) * n;
            for (int j = lo1; j < hi1; ++j) acc += std::abs(row[j] - mean);
        }
        covered = static_cast<std::int64_t>(hi0 - lo0) * std::max(hi1 - lo1, 0);
    }
    const double vol = volume_cells(f.dim(), side);
    acc += (vol - static_cast<double>(covered)) * std::abs(mean);
    return acc / vol;
}

// Generic fast field over the restricted or zero-extension family.
template <typename WindowForSide>
GridFunction sliding_field(const GridFunction& f, BoundaryMode mode, int side_cap, WindowForSide&& window_for_side) {
    const int n = f.resolution();
    const int dim = f.dim();
    std::vector<double> best(f.size(), kNegInf);
    SlidingMax slider;
    const int max_side = mode == BoundaryMode::zero_extension ? side_cap : n;
    const Span1 target{0, n - 1};
    for (int side = 1; side <= max_side; ++side) {
        const Span1 anchors = mode == BoundaryMode::zero_extension ? Span1{1 - side, n - 1} : Span1{0, n - side};
        fold_side(dim, side, {anchors, anchors}, {target, target}, window_for_side(side), best, slider);
    }
    return GridFunction(dim, n, std::move(best));
}

// Per-cell max over the dyadic cubes containing it of cube_value(side, a0, a1).
template <typename CubeValue>
GridFunction dyadic_field(int dim, int n, CubeValue&& cube_value) {
    std::vector<double> best(dim == 1 ? n : static_cast<std::size_t>(n) * n, kNegInf);
    for (int side = 1; side <= n; side *= 2) {
        const int blocks = n / side;
        if (dim == 1) {
            for (int b = 0; b < blocks; ++b) {
                const double v = cube_value(side, b * side, 0);
                for (int i = b * side; i < (b + 1) * side; ++i) best[i] = std::max(best[i], v);
            }
            continue;
        }
        for (int b0 = 0; b0 < blocks; ++b0) {
            for (int b1 = 0; b1 < blocks; ++b1) {
                const double v = cube_value(side, b0 * side, b1 * side);
                for (int i = b0 * side; i < (b0 + 1) * side; ++i) {
                    for (int j = b1 * side; j < (b1 + 1) * side; ++j) {
                        double& b = best[static_cast<std::size_t>(i) * n + j];
                        b = std::max(b, v);
                    }
                }
            }
        }
    }
    return GridFunction(dim, n, std::move(best));
}

// Exhaustive enumeration of the mode's family; calls visit(side, a0, a1).
template <typename Visit>
void for_each_family_cube(int dim, int n, BoundaryMode mode, int side_cap, Visit&& visit) {
    if (mode == BoundaryMode::dyadic) {
        for (int side = 1; side <= n; side *= 2) {
            for (int a0 = 0; a0 < n; a0 += side) {
                if (dim == 1) {
                    visit(side, a0, 0);
                    continue;
                }
                for (int a1 = 0; a1 < n; a1 += side) visit(side, a0, a1);
            }
        }
        return;
    }
    const int max_side = mode == BoundaryMode::zero_extension ? side_cap : n;
    for (int side = 1; side <= max_side; ++side) {
        const int lo = mode == BoundaryMode::zero_extension ? 1 - side : 0;
        const int hi = mode == BoundaryMode::zero_extension ? n - 1 : n - side;
        for (int a0 = lo; a0 <= hi; ++a0) {
            if (dim == 1) {
                visit(side, a0, 0);
                continue;
            }
            for (int a1 = lo; a1 <= hi; ++a1) visit(side, a0, a1);
        }
    }
}

// Covered in-domain cells of a cube, clipped.
template <typename Fn>
void for_each_covered(int dim, int n, int side, int a0, int a1, Fn&& fn) {
    const int lo0 = std::max(a0, 0);
    const int hi0 = std::min(a0 + side, n);
    if (dim == 1) {
        for (int i = lo0; i < hi0; ++i) fn(static_cast<std::size_t>(i));
        return;
    }
    const int lo1 = std::max(a1, 0);
    const int hi1 = std::min(a1 + side, n);
    for (int i = lo0; i < hi0; ++i) {
        for (int j = lo1; j < hi1; ++j) fn(static_cast<std::size_t>(i) * n + j);
    }
}

// Oscillations are shift invariant inside the domain; measuring them from
// f[0] makes constant windows vanish exactly. Zero extension pins the
// outside to 0, so there f is used as is.
GridFunction oscillation_frame(const GridFunction& f, BoundaryMode mode) {
    if (mode == BoundaryMode::zero_extension) return f;
    const double ref = f[0];
    return f.map([ref](double v) { return v - ref; });
}

template <typename Functional>
GridFunction naive_field(const GridFunction& f, BoundaryMode mode, int side_cap, Functional&& functional) {
    const int n = f.resolution();
    const int dim = f.dim();
    std::vector<double> best(f.size(), kNegInf);
    for_each_family_cube(dim, n, mode, side_cap, [&](int side, int a0, int a1) {
        const double value = functional(side, a0, a1);
        for_each_covered(dim, n, side, a0, a1, [&](std::size_t i) { best[i] = std::max(best[i], value); });
    });
    return GridFunction(dim, n, std::move(best));
}

}  // namespace

MaximalField maximal(const GridFunction& f, BoundaryMode mode, MaximalOptions options) {
    const PrefixTable table(f);
    const int dim = f.dim();
    if (mode == BoundaryMode::dyadic) {
        auto values = dyadic_field(dim, f.resolution(), [&](int side, int a0, int a1) {
            return table.box_abs_sum({a0, a1}, {a0 + side, a1 + side}) / volume_cells(dim, side);
        });
        return {std::move(values), mode, MaximalKind::hardy_littlewood};
    }
    auto values = sliding_field(f, mode, side_cap_for(f, options), [&](int side) {
        const double vol = volume_cells(dim, side);
        return [&table, side, vol](int a0, int a1) {
            return table.box_abs_sum({a0, a1}, {a0 + side, a1 + side}) / vol;
        };
    });
    return {std::move(values), mode, MaximalKind::hardy_littlewood};
}

MaximalField maximal_naive(const GridFunction& f, BoundaryMode mode, MaximalOptions options) {
    const int dim = f.dim();
    const int n = f.resolution();
    auto values = naive_field(f, mode, side_cap_for(f, options), [&](int side, int a0, int a1) {
        double acc = 0.0;
        for_each_covered(dim, n, side, a0, a1, [&](std::size_t i) { acc += std::abs(f[i]); });
        return acc / volume_cells(dim, side);
    });
    return {std::move(values), mode, MaximalKind::hardy_littlewood};
}

MaximalField sharp_maximal(const GridFunction& input, BoundaryMode mode, MaximalOptions options) {
    const GridFunction f = oscillation_frame(input, mode);
    const PrefixTable table(f);
    const int dim = f.dim();
    auto osc = [&](int side, int a0, int a1) {
        // A single cell always lies in the domain and has no oscillation;
        // skipping it avoids rounding residue from the prefix-table mean.
        if (side == 1) return 0.0;
        const double mean = table.box_sum({a0, a1}, {a0 + side, a1 + side}) / volume_cells(dim, side);
        return oscillation_direct(f, side, a0, a1, mean);
    };
    if (mode == BoundaryMode::dyadic) {
        return {dyadic_field(dim, f.resolution(), osc), mode, MaximalKind::sharp};
    }
    auto values = sliding_field(f, mode, side_cap_for(f, options), [&](int side) {
        return [&osc, side](int a0, int a1) { return osc(side, a0, a1); };
    });
    return {std::move(values), mode, MaximalKind::sharp};
}

MaximalField sharp_maximal_naive(const GridFunction& input, BoundaryMode mode, MaximalOptions options) {
    const GridFunction f = oscillation_frame(input, mode);
    const int dim = f.dim();
    const int n = f.resolution();
    auto values = naive_field(f, mode, side_cap_for(f, options), [&](int side, int a0, int a1) {
        double sum = 0.0;
        for_each_covered(dim, n, side, a0, a1, [&](std::size_t i) { sum += f[i]; });
        const double vol = volume_cells(dim, side);
        const double mean = sum / vol;
        double acc = 0.0;
        std::int64_t covered = 0;
        for_each_covered(dim, n, side, a0, a1, [&](std::size_t i) {
            acc += std::abs(f[i] - mean);
            ++covered;
        });
        acc += (vol - static_cast<double>(covered)) * std::abs(mean);
        return acc / vol;
    });
    return {std::move(values), mode, MaximalKind::sharp};
}

double zero_extension_tail_bound(const GridFunction& f, int side_cap) {
    double l1 = 0.0;
    for (double v : f.values()) l1 += std::abs(v);
    l1 *= f.cell_volume();
    const double width = static_cast<double>(side_cap) / f.resolution();
    return l1 / (f.dim() == 1 ? width : width * width);
}

std::vector<double> maximal_of_restriction(const GridFunction& w, const GridCube& q, BoundaryMode mode) {
    const int n = w.resolution();
    const int dim = w.dim();
    if (q.dim != dim || !q.inside(n)) throw Error(ErrorCode::range, "cube outside grid");

    if (mode == BoundaryMode::dyadic) {
        std::vector<double> masked(w.size(), 0.0);
        for_each_cell(q, [&](Cell c) { masked[w.index(c)] = w.at(c); });
        const auto field = maximal(GridFunction(dim, n, std::move(masked)), mode);
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(q.cell_count()));
        for_each_cell(q, [&](Cell c) { out.push_back(field.values.at(c)); });
        return out;
    }

    // A cube of side >= side(q) covering x in q can be slid to cover all of q
    // while still covering x, so those sides contribute exactly w(Q)/|Q|.
    const PrefixTable table(w);
    const Cell qhi{q.anchor[0] + q.side, q.anchor[1] + q.side};
    const double mean = table.cells_sum(q) / static_cast<double>(q.cell_count());
    std::vector<double> best(static_cast<std::size_t>(q.cell_count()), mean);
    SlidingMax slider;
    std::array<Span1, 2> targets{Span1{q.anchor[0], q.anchor[0] + q.side - 1},
                                 Span1{q.anchor[1], q.anchor[1] + q.side - 1}};
    for (int side = 1; side < q.side; ++side) {
        std::array<Span1, 2> anchors{};
        for (int k = 0; k < 2; ++k) {
            const int lo = q.anchor[k] - side + 1;
            const int hi = q.anchor[k] + q.side - 1;
            anchors[k] = mode == BoundaryMode::zero_extension ? Span1{lo, hi}
                                                             : Span1{std::max(lo, 0), std::min(hi, n - side)};
        }
        const double vol = volume_cells(dim, side);
        fold_side(
            dim, side, anchors, targets,
            [&](int a0, int a1) {
                const Cell lo{std::max(a0, q.anchor[0]), std::max(a1, q.anchor[1])};
                const Cell hi{std::min(a0 + side, qhi[0]), std::min(a1 + side, qhi[1])};
                return table.box_sum(lo, hi) / vol;
            },
            best, slider);
    }
    return best;
}

namespace {

GridFunction centered_abs(const GridFunction& f, const GridCube& q) {
    if (q.dim != f.dim() || !q.inside(f.resolution())) throw Error(ErrorCode::range, "cube outside grid");
    if (!is_power_of_two(q.side)) {
        throw Error(ErrorCode::unsupported_cube,
                    "local dyadic maximal needs a power-of-two side, got " + std::to_string(q.side));
    }
    const GridFunction local = restrict_to(f, q);
    double sum = 0.0;
    for (double v : local.values()) sum += v;
    const double mean = sum / static_cast<double>(local.size());
    return local.map([mean](double v) { return std::abs(v - mean); });
}

}  // namespace

std::vector<double> local_maximal(const GridFunction& f, const GridCube& q) {
    const GridFunction g = centered_abs(f, q);
    const auto field = maximal(g, BoundaryMode::dyadic);
    return {field.values.values().begin(), field.values.values().end()};
}

std::vector<double> local_maximal_naive(const GridFunction& f, const GridCube& q) {
    const GridFunction g = centered_abs(f, q);
    const auto field = maximal_naive(g, BoundaryMode::dyadic);
    return {field.values.values().begin(), field.values.values().end()};
}

double weak_l1_quasinorm(const GridFunction& g, double normalization) {
    if (!(normalization > 0.0)) throw Error(ErrorCode::validation, "normalization must be positive");
    std::vector<double> a(g.size());
    std::transform(g.values().begin(), g.values().end(), a.begin(), [](double v) { return std::abs(v); });
    std::sort(a.begin(), a.end(), std::greater<>());
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        // Last occurrence of a distinct value: i + 1 cells have |g| >= a[i].
        if (i + 1 < a.size() && a[i + 1] == a[i]) continue;
        best = std::max(best, a[i] * static_cast<double>(i + 1) * g.cell_volume());
    }
    return best / normalization;
}

NonlocalProbe nonlocal_bound_probe(const GridFunction& f, const GridCube& q, BoundaryMode mode) {
    if (is_constant(f)) throw Error(ErrorCode::degenerate_input, "f is constant, so M#f vanishes");
    triple(q, f.resolution());
    return nonlocal_bound_probe(f, q, mode, maximal(f, mode).values, sharp_maximal(f, mode).values);
}

NonlocalProbe nonlocal_bound_probe(const GridFunction& f, const GridCube& q, BoundaryMode mode,
                                   const GridFunction& mf, const GridFunction& msharp) {
    if (is_constant(f)) throw Error(ErrorCode::degenerate_input, "f is constant, so M#f vanishes");
    NonlocalProbe probe;
    probe.tripled = triple(q, f.resolution());
    const PrefixTable table(f);
    const double mean3 = cube_average(table, probe.tripled);
    std::vector<double> g(f.values().begin(), f.values().end());
    for_each_cell(probe.tripled, [&](Cell c) { g[f.index(c)] = mean3; });
    const auto mg = maximal(GridFunction(f.dim(), f.resolution(), std::move(g)), mode);

    probe.essinf_mf = cube_min(mf, q);
    probe.max_ratio = -1.0;
    for_each_cell(q, [&](Cell c) {
        const double denom = msharp.at(c);
        if (!(denom > 0.0)) {
            throw Error(ErrorCode::degenerate_input, "M#f vanishes at a cell of Q");
        }
        const double ratio = std::max(mg.values.at(c) - probe.essinf_mf, 0.0) / denom;
        if (ratio > probe.max_ratio) {
            probe.max_ratio = ratio;
            probe.witness = c;
        }
    });
    return probe;
}

}  // namespace oslx

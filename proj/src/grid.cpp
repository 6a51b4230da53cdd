// SPDX-License-Identifier: Apache-2.0
#include "oslx/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "oslx/error.hpp"

namespace oslx {

bool is_power_of_two(std::int64_t v) noexcept { return v > 0 && (v & (v - 1)) == 0; }

GridFunction::GridFunction(int dim, int n, std::vector<double> values)
    : dim_(dim), n_(n), values_(std::move(values)) {
    if (dim != 1 && dim != 2) throw Error(ErrorCode::validation, "dimension must be 1 or 2");
    if (!is_power_of_two(n)) throw Error(ErrorCode::validation, "resolution must be a power of two, got " + std::to_string(n));
    const std::size_t expected = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
    if (values_.size() != expected) {
        throw Error(ErrorCode::validation, "expected " + std::to_string(expected) + " values, got " +
                                               std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(ErrorCode::validation, "non-finite value at cell " + std::to_string(i));
        }
    }
}

GridFunction GridFunction::constant(int dim, int n, double value) {
    const std::size_t count = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
    return GridFunction(dim, n, std::vector<double>(count, value));
}

GridFunction GridFunction::map(const std::function<double(double)>& op) const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), op);
    return GridFunction(dim_, n_, std::move(out));
}

namespace {

GridFunction floored(const GridFunction& w, bool allow_floor) {
    std::vector<double> v(w.values().begin(), w.values().end());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] <= 0.0 && !allow_floor) {
            throw Error(ErrorCode::validation,
                        "weight has nonpositive entry at cell " + std::to_string(i) + " (use --floor to accept)");
        }
        v[i] = std::max(v[i], Weight::kFloor);
    }
    return GridFunction(w.dim(), w.resolution(), std::move(v));
}

}  // namespace

Weight::Weight(const GridFunction& w, bool allow_floor) : w_(floored(w, allow_floor)) {}

GridCube whole_domain(int dim, int n) { return GridCube{dim, {0, 0}, n}; }

// Neumaier-compensated running sums keep every table entry within a few ulp
// of the exact prefix, so differences are accurate relative to the window's
// absolute mass.
namespace {

class RunningSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

std::vector<double> build_table(const GridFunction& f, bool absolute) {
    const int n = f.resolution();
    auto val = [&](std::size_t i) { return absolute ? std::abs(f[i]) : f[i]; };
    if (f.dim() == 1) {
        std::vector<double> t(n + 1, 0.0);
        RunningSum acc;
        for (int i = 0; i < n; ++i) {
            acc.add(val(i));
            t[i + 1] = acc.value();
        }
        return t;
    }
    const int w = n + 1;
    std::vector<double> rows(static_cast<std::size_t>(n) * w, 0.0);
    for (int i = 0; i < n; ++i) {
        RunningSum acc;
        for (int j = 0; j < n; ++j) {
            acc.add(val(static_cast<std::size_t>(i) * n + j));
            rows[static_cast<std::size_t>(i) * w + j + 1] = acc.value();
        }
    }
    std::vector<double> t(static_cast<std::size_t>(w) * w, 0.0);
    for (int j = 1; j <= n; ++j) {
        RunningSum acc;
        for (int i = 0; i < n; ++i) {
            acc.add(rows[static_cast<std::size_t>(i) * w + j]);
            t[static_cast<std::size_t>(i + 1) * w + j] = acc.value();
        }
    }
    return t;
}

}  // namespace

PrefixTable::PrefixTable(const GridFunction& f)
    : dim_(f.dim()), n_(f.resolution()), sum_(build_table(f, false)), abs_(build_table(f, true)) {}

double PrefixTable::box(const std::vector<double>& t, Cell lo, Cell hi) const noexcept {
    const int a0 = std::clamp(lo[0], 0, n_);
    const int b0 = std::clamp(hi[0], 0, n_);
    if (b0 <= a0) return 0.0;
    if (dim_ == 1) return t[b0] - t[a0];
    const int a1 = std::clamp(lo[1], 0, n_);
    const int b1 = std::clamp(hi[1], 0, n_);
    if (b1 <= a1) return 0.0;
    const std::size_t w = static_cast<std::size_t>(n_) + 1;
    return (t[b0 * w + b1] - t[a0 * w + b1]) - (t[b0 * w + a1] - t[a0 * w + a1]);
}

namespace {

void require_inside(const PrefixTable& table, const GridCube& q) {
    if (q.dim != table.dim() || !q.inside(table.resolution())) {
        throw Error(ErrorCode::range, "cube (anchor " + std::to_string(q.anchor[0]) + "," +
                                          std::to_string(q.anchor[1]) + ", side " + std::to_string(q.side) +
                                          ") outside grid of resolution " + std::to_string(table.resolution()));
    }
}

Cell upper(const GridCube& q) { return {q.anchor[0] + q.side, q.anchor[1] + q.side}; }

}  // namespace

double PrefixTable::cells_sum(const GridCube& q) const {
    require_inside(*this, q);
    return box_sum(q.anchor, upper(q));
}

double PrefixTable::cells_abs_sum(const GridCube& q) const {
    require_inside(*this, q);
    return box_abs_sum(q.anchor, upper(q));
}

double cube_sum(const PrefixTable& table, const GridCube& q) {
    const double h = 1.0 / table.resolution();
    return table.cells_sum(q) * (table.dim() == 1 ? h : h * h);
}

double cube_average(const PrefixTable& table, const GridCube& q) {
    return table.cells_sum(q) / static_cast<double>(q.cell_count());
}

double cube_min(const GridFunction& f, const GridCube& q) {
    if (q.dim != f.dim() || !q.inside(f.resolution())) throw Error(ErrorCode::range, "cube outside grid");
    double m = std::numeric_limits<double>::infinity();
    for_each_cell(q, [&](Cell c) { m = std::min(m, f.at(c)); });
    return m;
}

double cube_max(const GridFunction& f, const GridCube& q) {
    if (q.dim != f.dim() || !q.inside(f.resolution())) throw Error(ErrorCode::range, "cube outside grid");
    double m = -std::numeric_limits<double>::infinity();
    for_each_cell(q, [&](Cell c) { m = std::max(m, f.at(c)); });
    return m;
}

double weighted_measure(const WeightedMeasure& wm, const GridCube& q) { return cube_sum(wm.table(), q); }

std::int64_t all_cube_count(int n, int dim) noexcept {
    std::int64_t total = 0;
    for (std::int64_t l = 1; l <= n; ++l) {
        const std::int64_t k = n - l + 1;
        total += dim == 1 ? k : k * k;
    }
    return total;
}

std::vector<GridCube> enumerate_cubes(int n, int dim, Family family, std::optional<Cell> containing) {
    std::vector<GridCube> out;
    auto emit = [&](int side, int a0, int a1) {
        GridCube q{dim, {a0, dim == 1 ? 0 : a1}, side};
        if (!containing || q.contains(*containing)) out.push_back(q);
    };
    for (int side = 1; side <= n; ++side) {
        if (family == Family::dyadic && !(is_power_of_two(side) && n % side == 0)) continue;
        const int step = family == Family::dyadic ? side : 1;
        for (int a0 = 0; a0 + side <= n; a0 += step) {
            if (dim == 1) {
                emit(side, a0, 0);
                continue;
            }
            for (int a1 = 0; a1 + side <= n; a1 += step) emit(side, a0, a1);
        }
    }
    return out;
}

GridCube triple(const GridCube& q, int n) {
    GridCube t = q;
    t.side = 3 * q.side;
    for (int k = 0; k < q.dim; ++k) t.anchor[k] = q.anchor[k] - q.side;
    if (!t.inside(n)) {
        throw Error(ErrorCode::tripling_unavailable,
                    "tripled cube of side " + std::to_string(t.side) + " leaves the domain of " + std::to_string(n) +
                        " cells");
    }
    return t;
}

}  // namespace oslx

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace oslx {

using Cell = std::array<int, 2>;

/// Step function on a uniform grid of N^dim cells over [0,1)^dim.
///
/// Values are stored row-major: in two dimensions the cell (i0, i1) lives at
/// i0 * N + i1, with axis 0 the slow axis. Immutable after construction;
/// N must be a power of two and every value finite.
class GridFunction {
public:
    GridFunction(int dim, int n, std::vector<double> values);

    static GridFunction constant(int dim, int n, double value);

    int dim() const noexcept { return dim_; }
    int resolution() const noexcept { return n_; }
    std::size_t size() const noexcept { return values_.size(); }
    double cell_width() const noexcept { return 1.0 / n_; }
    double cell_volume() const noexcept { return dim_ == 1 ? cell_width() : cell_width() * cell_width(); }

    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double at(Cell c) const noexcept { return values_[index(c)]; }

    std::size_t index(Cell c) const noexcept {
        return dim_ == 1 ? static_cast<std::size_t>(c[0])
                         : static_cast<std::size_t>(c[0]) * n_ + c[1];
    }
    Cell cell(std::size_t i) const noexcept {
        return dim_ == 1 ? Cell{static_cast<int>(i), 0}
                         : Cell{static_cast<int>(i / n_), static_cast<int>(i % n_)};
    }

    bool same_shape(const GridFunction& other) const noexcept {
        return dim_ == other.dim_ && n_ == other.n_;
    }

    /// New function on the same grid with op applied cellwise.
    GridFunction map(const std::function<double(double)>& op) const;

private:
    int dim_;
    int n_;
    std::vector<double> values_;
};

/// Positive grid function. Entries below kFloor are raised to kFloor;
/// nonpositive entries are rejected unless flooring was requested.
class Weight {
public:
    static constexpr double kFloor = 1e-12;

    explicit Weight(const GridFunction& w, bool allow_floor = false);

    const GridFunction& function() const noexcept { return w_; }
    int dim() const noexcept { return w_.dim(); }
    int resolution() const noexcept { return w_.resolution(); }
    double operator[](std::size_t i) const noexcept { return w_[i]; }

private:
    GridFunction w_;
};

/// Axis-aligned cube in cell units. In the zero-extension boundary mode the
/// anchor may be negative and the cube may overhang the domain.
struct GridCube {
    int dim = 1;
    Cell anchor{0, 0};
    int side = 1;

    std::int64_t cell_count() const noexcept {
        return dim == 1 ? side : static_cast<std::int64_t>(side) * side;
    }
    /// Lebesgue measure (side/N)^dim.
    double measure(int n) const noexcept {
        const double s = static_cast<double>(side) / n;
        return dim == 1 ? s : s * s;
    }
    bool contains(Cell c) const noexcept {
        for (int k = 0; k < dim; ++k) {
            if (c[k] < anchor[k] || c[k] >= anchor[k] + side) return false;
        }
        return true;
    }
    bool inside(int n) const noexcept {
        for (int k = 0; k < dim; ++k) {
            if (anchor[k] < 0 || anchor[k] + side > n) return false;
        }
        return side >= 1;
    }
    bool contains(const GridCube& other) const noexcept {
        for (int k = 0; k < dim; ++k) {
            if (other.anchor[k] < anchor[k] || other.anchor[k] + other.side > anchor[k] + side) return false;
        }
        return true;
    }

    friend bool operator==(const GridCube&, const GridCube&) = default;
};

GridCube whole_domain(int dim, int n);

/// Calls fn(cell) for every cell covered by q, in row-major order.
template <typename Fn>
void for_each_cell(const GridCube& q, Fn&& fn) {
    if (q.dim == 1) {
        for (int i = q.anchor[0]; i < q.anchor[0] + q.side; ++i) fn(Cell{i, 0});
        return;
    }
    for (int i = q.anchor[0]; i < q.anchor[0] + q.side; ++i) {
        for (int j = q.anchor[1]; j < q.anchor[1] + q.side; ++j) fn(Cell{i, j});
    }
}

/// Summed-area table of values and |values|, padded with a leading row and
/// column of zeros. Running sums are accumulated with Neumaier compensation.
class PrefixTable {
public:
    explicit PrefixTable(const GridFunction& f);

    int dim() const noexcept { return dim_; }
    int resolution() const noexcept { return n_; }

    /// Sum of cell values over the half-open index box [lo, hi) per axis,
    /// in cell units. The box is clipped to the domain, so boxes that
    /// overhang it count only their covered cells.
    double box_sum(Cell lo, Cell hi) const noexcept { return box(sum_, lo, hi); }
    double box_abs_sum(Cell lo, Cell hi) const noexcept { return box(abs_, lo, hi); }

    /// Cell-unit sums over a cube lying inside the domain; range error otherwise.
    double cells_sum(const GridCube& q) const;
    double cells_abs_sum(const GridCube& q) const;

private:
    double box(const std::vector<double>& t, Cell lo, Cell hi) const noexcept;

    int dim_;
    int n_;
    std::vector<double> sum_;
    std::vector<double> abs_;
};

/// Integral of f over q (cell values times cell volume).
double cube_sum(const PrefixTable& table, const GridCube& q);
/// Mean f_Q.
double cube_average(const PrefixTable& table, const GridCube& q);
/// Essential infimum over q, i.e. the minimum covered cell value.
double cube_min(const GridFunction& f, const GridCube& q);
double cube_max(const GridFunction& f, const GridCube& q);

class WeightedMeasure {
public:
    explicit WeightedMeasure(const Weight& w) : table_(w.function()) {}
    const PrefixTable& table() const noexcept { return table_; }

private:
    PrefixTable table_;
};

/// w(Q).
double weighted_measure(const WeightedMeasure& wm, const GridCube& q);

enum class Family { all, dyadic };

/// Cubes inside the domain, ordered by ascending side and then
/// lexicographic anchor. With `containing` set, only cubes covering that cell.
std::vector<GridCube> enumerate_cubes(int n, int dim, Family family,
                                      std::optional<Cell> containing = std::nullopt);

/// Number of cubes of the all family, sum over L of (N - L + 1)^dim.
std::int64_t all_cube_count(int n, int dim) noexcept;

/// Same center, three times the side. Throws tripling_unavailable when the
/// result leaves [0, n)^dim.
GridCube triple(const GridCube& q, int n);

bool is_power_of_two(std::int64_t v) noexcept;

}  // namespace oslx

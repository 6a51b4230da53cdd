// SPDX-License-Identifier: Apache-2.0
// Brute-force reference implementations used as test oracles. They share no
// code with the library beyond the GridFunction container: every cube family
// is enumerated here from its definition and every average is summed cell by
// cell.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "oslx/grid.hpp"
#include "oslx/operators.hpp"

namespace oracle {

using oslx::BoundaryMode;
using oslx::GridFunction;

/// A cube in cell units, possibly overhanging the domain.
struct Box {
    int a0, a1, side;
};

inline bool pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

/// Calls visit(box) for every cube of the family.
inline void each_cube(int dim, int n, BoundaryMode mode, int cap, const std::function<void(Box)>& visit) {
    const int max_side = mode == BoundaryMode::zero_extension ? cap : n;
    for (int s = 1; s <= max_side; ++s) {
        if (mode == BoundaryMode::dyadic && !pow2(s)) continue;
        const int lo = mode == BoundaryMode::zero_extension ? 1 - s : 0;
        const int hi = mode == BoundaryMode::zero_extension ? n - 1 : n - s;
        for (int a0 = lo; a0 <= hi; ++a0) {
            if (mode == BoundaryMode::dyadic && a0 % s != 0) continue;
            if (dim == 1) {
                visit({a0, 0, s});
                continue;
            }
            for (int a1 = lo; a1 <= hi; ++a1) {
                if (mode == BoundaryMode::dyadic && a1 % s != 0) continue;
                visit({a0, a1, s});
            }
        }
    }
}

/// Indices of domain cells covered by the box.
inline std::vector<std::size_t> covered(int dim, int n, Box b) {
    std::vector<std::size_t> out;
    for (int i = b.a0; i < b.a0 + b.side; ++i) {
        if (i < 0 || i >= n) continue;
        if (dim == 1) {
            out.push_back(static_cast<std::size_t>(i));
            continue;
        }
        for (int j = b.a1; j < b.a1 + b.side; ++j) {
            if (j < 0 || j >= n) continue;
            out.push_back(static_cast<std::size_t>(i) * n + j);
        }
    }
    return out;
}

inline double volume(int dim, int side) { return dim == 1 ? side : static_cast<double>(side) * side; }

/// Per cell, the max of functional(box, cells) over the family cubes covering it.
inline std::vector<double> field(int dim, int n, BoundaryMode mode, int cap,
                                 const std::function<double(Box, const std::vector<std::size_t>&)>& functional) {
    std::vector<double> best(dim == 1 ? n : n * n, -std::numeric_limits<double>::infinity());
    each_cube(dim, n, mode, cap, [&](Box b) {
        const auto cells = covered(dim, n, b);
        if (cells.empty()) return;
        const double v = functional(b, cells);
        for (auto i : cells) best[i] = std::max(best[i], v);
    });
    return best;
}

inline std::vector<double> maximal(const GridFunction& f, BoundaryMode mode, int cap = 0) {
    const int n = f.resolution();
    const int dim = f.dim();
    return field(dim, n, mode, cap ? cap : 3 * n, [&](Box b, const std::vector<std::size_t>& cells) {
        double s = 0.0;
        for (auto i : cells) s += std::abs(f[i]);
        return s / volume(dim, b.side);
    });
}

/// Mean oscillation over the box, f extended by zero outside the domain.
inline double oscillation(const GridFunction& f, Box b, const std::vector<std::size_t>& cells) {
    const double vol = volume(f.dim(), b.side);
    double s = 0.0;
    for (auto i : cells) s += f[i];
    const double mean = s / vol;
    double acc = 0.0;
    for (auto i : cells) acc += std::abs(f[i] - mean);
    acc += (vol - static_cast<double>(cells.size())) * std::abs(mean);
    return acc / vol;
}

inline std::vector<double> sharp(const GridFunction& f, BoundaryMode mode, int cap = 0) {
    const int n = f.resolution();
    return field(f.dim(), n, mode, cap ? cap : 3 * n,
                 [&](Box b, const std::vector<std::size_t>& cells) { return oscillation(f, b, cells); });
}

/// sup over the family (restricted cubes, or dyadic) of a per-cube functional.
inline double sup(int dim, int n, bool dyadic, const std::function<double(const std::vector<std::size_t>&)>& fn) {
    double best = 0.0;
    each_cube(dim, n, dyadic ? BoundaryMode::dyadic : BoundaryMode::restricted, 0,
              [&](Box b) { best = std::max(best, fn(covered(dim, n, b))); });
    return best;
}

inline double bmo(const GridFunction& f, bool dyadic) {
    return sup(f.dim(), f.resolution(), dyadic, [&](const std::vector<std::size_t>& c) {
        double s = 0.0;
        for (auto i : c) s += f[i];
        const double mean = s / c.size();
        double acc = 0.0;
        for (auto i : c) acc += std::abs(f[i] - mean);
        return acc / c.size();
    });
}

inline double blo_w(const GridFunction& f, const GridFunction& w, bool dyadic) {
    return sup(f.dim(), f.resolution(), dyadic, [&](const std::vector<std::size_t>& c) {
        double lo = std::numeric_limits<double>::infinity();
        for (auto i : c) lo = std::min(lo, f[i]);
        double num = 0.0;
        double den = 0.0;
        for (auto i : c) {
            num += (f[i] - lo) * w[i];
            den += w[i];
        }
        return num / den;
    });
}

inline double blo(const GridFunction& f, bool dyadic) {
    return blo_w(f, GridFunction::constant(f.dim(), f.resolution(), 1.0), dyadic);
}

/// Fujii-Wilson constant: for each family cube Q, M(w chi_Q) by brute force
/// over every cube of `mode` (restricted or dyadic), integrated over Q.
inline double fujii_wilson(const GridFunction& w, BoundaryMode mode, bool dyadic_family) {
    const int n = w.resolution();
    const int dim = w.dim();
    double best = 0.0;
    each_cube(dim, n, dyadic_family ? BoundaryMode::dyadic : BoundaryMode::restricted, 0, [&](Box q) {
        const auto qcells = covered(dim, n, q);
        std::vector<double> restricted(w.size(), 0.0);
        double wq = 0.0;
        for (auto i : qcells) {
            restricted[i] = w[i];
            wq += w[i];
        }
        const auto m = oracle::maximal(GridFunction(dim, n, restricted), mode);
        double integral = 0.0;
        for (auto i : qcells) integral += m[i];
        best = std::max(best, integral / wq);
    });
    return best;
}

inline double a1(const GridFunction& w, BoundaryMode mode) {
    const auto m = oracle::maximal(w, mode);
    double best = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) best = std::max(best, m[i] / w[i]);
    return best;
}

/// Local dyadic maximal function of (f - f_Q) chi_Q: for each cell of Q, the
/// max over dyadic subcubes of Q containing it of the mean of |f - f_Q|.
inline std::vector<double> local_dyadic(const GridFunction& f, int a0, int a1, int side) {
    const int dim = f.dim();
    const int n = f.resolution();
    const auto qcells = covered(dim, n, {a0, a1, side});
    double s = 0.0;
    for (auto i : qcells) s += f[i];
    const double mean = s / qcells.size();
    const std::size_t m = dim == 1 ? side : static_cast<std::size_t>(side) * side;
    std::vector<double> out(m, 0.0);
    for (int sub = 1; sub <= side; sub *= 2) {
        for (int b0 = 0; b0 < side; b0 += sub) {
            for (int b1 = 0; b1 < (dim == 1 ? 1 : side); b1 += sub) {
                double acc = 0.0;
                std::vector<std::size_t> local;
                for (int i = b0; i < b0 + sub; ++i) {
                    for (int j = b1; j < b1 + (dim == 1 ? 1 : sub); ++j) {
                        const std::size_t global =
                            dim == 1 ? static_cast<std::size_t>(a0 + i) : static_cast<std::size_t>(a0 + i) * n + (a1 + j);
                        acc += std::abs(f[global] - mean);
                        local.push_back(dim == 1 ? static_cast<std::size_t>(i) : static_cast<std::size_t>(i) * side + j);
                    }
                }
                const double avg = acc / local.size();
                for (auto k : local) out[k] = std::max(out[k], avg);
            }
        }
    }
    return out;
}

inline bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
}

}  // namespace oracle

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>
#include <vector>

#include "oslx/grid.hpp"

namespace oslx {

/// How the supremum over cubes is taken on a bounded grid.
///   restricted      cubes contained in the domain
///   zero_extension  f extended by zero, cubes of side up to a cap (3N cells
///                   by default) that meet the domain
///   dyadic          dyadic cubes of the domain
enum class BoundaryMode { restricted, zero_extension, dyadic };

enum class MaximalKind { hardy_littlewood, sharp };

std::string_view to_string(BoundaryMode mode) noexcept;
std::string_view to_string(MaximalKind kind) noexcept;
BoundaryMode parse_mode(std::string_view text);

struct MaximalOptions {
    /// Largest cube side, in cells, for zero extension. Zero means 3N.
    int side_cap = 0;
};

struct MaximalField {
    GridFunction values;
    BoundaryMode mode;
    MaximalKind kind;
};

/// Hardy-Littlewood maximal function: per cell, the largest average of |f|
/// over the mode's cubes containing the cell.
///
/// Window averages come from a summed-area table; the per-cell maxima over
/// windows are sliding-window maxima, separably along each axis. O(N^(d+1)).
MaximalField maximal(const GridFunction& f, BoundaryMode mode, MaximalOptions options = {});

/// Exhaustive twin of maximal(): every cube of the family is summed directly
/// and its average scattered to the cells it covers. Tests and small N only.
MaximalField maximal_naive(const GridFunction& f, BoundaryMode mode, MaximalOptions options = {});

/// Sharp maximal function M#f, the largest mean oscillation
/// (1/|Q|) sum |f - f_Q| over cubes containing the cell.
///
/// Each window's oscillation is a direct O(L^d) pass around a prefix-table
/// mean, so the exact (restricted, zero_extension) variants cost
/// O(sum_L windows(L) * L^d), about N^3/6 in one dimension and N^5/30 in two.
/// The dyadic mode is the fast variant, O(N^d log N).
MaximalField sharp_maximal(const GridFunction& f, BoundaryMode mode, MaximalOptions options = {});

/// Exhaustive twin of sharp_maximal() with direct means and scatter.
MaximalField sharp_maximal_naive(const GridFunction& f, BoundaryMode mode, MaximalOptions options = {});

/// Upper bound for the averages of |f| (times two for the oscillations) over
/// cubes longer than the zero-extension side cap: ||f||_1 / (cap/N)^d.
double zero_extension_tail_bound(const GridFunction& f, int side_cap);

/// M(w chi_Q) evaluated on the cells of q, row-major over q.
std::vector<double> maximal_of_restriction(const GridFunction& w, const GridCube& q, BoundaryMode mode);

/// Local dyadic maximal function of (f - f_Q) chi_Q on the cells of q,
/// row-major over q. The side of q must be a power of two.
std::vector<double> local_maximal(const GridFunction& f, const GridCube& q);
std::vector<double> local_maximal_naive(const GridFunction& f, const GridCube& q);

/// Weak-L1 quasinorm sup_t t |{|g| > t}| / normalization, evaluated exactly
/// as the max over distinct values v of v |{|g| >= v}| / normalization.
double weak_l1_quasinorm(const GridFunction& g, double normalization);

struct NonlocalProbe {
    double max_ratio = 0.0;  ///< max over x in Q of (Mg(x) - essinf_Q Mf)^+ / M#f(x)
    Cell witness{0, 0};
    double essinf_mf = 0.0;
    GridCube tripled;
};

/// Empirical constant in Mg <= c M#f + essinf_Q Mf, where g equals f_{3Q}
/// on 3Q and f elsewhere.
NonlocalProbe nonlocal_bound_probe(const GridFunction& f, const GridCube& q, BoundaryMode mode);

/// Same, with Mf and M#f (in `mode`) already computed.
NonlocalProbe nonlocal_bound_probe(const GridFunction& f, const GridCube& q, BoundaryMode mode,
                                   const GridFunction& mf, const GridFunction& msharp);

bool is_constant(const GridFunction& f) noexcept;

/// Values of f on the cells of q, as a grid of resolution side(q).
GridFunction restrict_to(const GridFunction& f, const GridCube& q);

}  // namespace oslx

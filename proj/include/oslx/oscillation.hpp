// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string_view>

#include "oslx/grid.hpp"
#include "oslx/operators.hpp"

namespace oslx {

std::string_view to_string(Family family) noexcept;
Family parse_family(std::string_view text);

/// Value of a sup-over-cubes seminorm and the first cube (in enumeration
/// order) attaining it.
struct SeminormReport {
    double value = 0.0;
    GridCube witness;
    Family family = Family::all;
};

// Per-cube functionals. The seminorms below are their maxima over a family.

/// (1/|Q|) sum_Q |f - f_Q|
double mean_oscillation(const GridFunction& f, const GridCube& q);
/// (1/|Q|) sum_Q (f - min_Q f)
double lower_oscillation(const GridFunction& f, const GridCube& q);
/// (1/w(Q)) sum_Q (f - min_Q f) w
double weighted_lower_oscillation(const GridFunction& f, const Weight& w, const GridCube& q);

SeminormReport bmo_seminorm(const GridFunction& f, Family family);
SeminormReport blo_seminorm(const GridFunction& f, Family family);
SeminormReport blo_w_seminorm(const GridFunction& f, const Weight& w, Family family);

struct A1Report {
    double value = 1.0;
    bool finite = true;
    Cell witness{0, 0};
};

/// max over cells of Mw / w.
A1Report a1_constant(const Weight& w, BoundaryMode mode);

struct WeightConstants {
    A1Report a1;
    double a_infty = 1.0;
    GridCube a_infty_witness;
    BoundaryMode mode = BoundaryMode::restricted;
    Family family = Family::dyadic;
};

/// (1/w(Q)) integral over Q of M(w chi_Q), for one cube.
double fujii_wilson_cube(const Weight& w, const GridCube& q, BoundaryMode mode);

/// Fujii-Wilson A-infinity constant (max of fujii_wilson_cube over the
/// family) together with the A1 constant in the same mode.
WeightConstants fujii_wilson(const Weight& w, BoundaryMode mode, Family family);

/// Family used when none is requested: all cubes up to N = 128 in one
/// dimension and N = 16 in two, dyadic above.
Family default_a_infty_family(int n, int dim) noexcept;

/// v = [M(w chi_Q / w_Q)]^(1/2) over the whole grid.
GridFunction coifman_rochberg(const Weight& w, const GridCube& q, BoundaryMode mode);

/// max(0, log f); domain error if any value is nonpositive.
GridFunction log_plus_transform(const GridFunction& f);
GridFunction log_plus_transform(const Weight& w);
/// e^(alpha f), floored like every weight.
Weight exp_weight(const GridFunction& f, double alpha);

struct ReverseHolderCheck {
    double lhs = 0.0;  ///< w(E)/w(Q)
    double rhs = 0.0;  ///< 2 (|E|/|Q|)^(1 / (2^(d+1) [w]_Ainf))
    bool ok = false;
};

/// A-infinity set-measure estimate for E (a set of cells) inside Q.
ReverseHolderCheck reverse_holder_check(const Weight& w, const GridCube& q, std::span<const Cell> e,
                                        double a_infty);
/// Same, with [w]_Ainf from the restricted all-cubes constant.
ReverseHolderCheck reverse_holder_check(const Weight& w, const GridCube& q, std::span<const Cell> e);

struct LLogLRatio {
    double lhs = 0.0;  ///< (1/|Q|) integral_Q M(w chi_Q)
    double rhs = 0.0;  ///< (1/|Q|) integral_Q (1 + log+(w/w_Q)) w
    double ratio = 0.0;
};

LLogLRatio llogl_ratio(const Weight& w, const GridCube& q, BoundaryMode mode);

}  // namespace oslx

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oslx/grid.hpp"
#include "oslx/operators.hpp"
#include "oslx/oscillation.hpp"

namespace oslx {

/// Mf and M#f of one input in one boundary mode.
struct Fields {
    GridFunction mf;
    GridFunction msharp;
    BoundaryMode mode;
};

/// Rejects constant f (degenerate input) before computing both fields.
Fields compute_fields(const GridFunction& f, BoundaryMode mode);

/// r(x) = (Mf(x) - min_Q Mf) / M#f(x) on the cells of q, row-major over q.
/// Throws degenerate_input if M#f vanishes somewhere on q.
std::vector<double> oscillation_ratio(const GridFunction& mf, const GridFunction& msharp, const GridCube& q);

/// (sum_Q v^p w / w(Q))^(1/p), with values row-major over q.
double weighted_power_mean(std::span<const double> values, const Weight& w, const GridCube& q, double p);

struct RatioRecord {
    double lhs = 0.0;
    double p = 1.0;
    double a_infty = 1.0;
    double normalized = 0.0;  ///< lhs / (p [w]_Ainf)
    std::string f_ref;
    std::string w_ref;
    GridCube cube;
    BoundaryMode mode = BoundaryMode::restricted;
    Family family = Family::dyadic;
};

/// Left side of the weighted BMO-to-BLO estimate for the maximal function,
/// normalized by p [w]_Ainf.
RatioRecord thm1_ratio(const Fields& fields, const Weight& w, const GridCube& q, double p, double a_infty,
                       Family family);
/// Convenience form computing fields and [w]_Ainf (default family for N).
RatioRecord thm1_ratio(const GridFunction& f, const Weight& w, const GridCube& q, double p, BoundaryMode mode);

/// Same with the local dyadic maximal function of (f - f_Q) chi_Q as numerator.
RatioRecord cp_ratio(const GridFunction& f, const GridFunction& msharp, const Weight& w, const GridCube& q, double p,
                     double a_infty, Family family);
/// Convenience form: restricted M#f and default-family [w]_Ainf. f must not
/// be constant on q.
RatioRecord cp_ratio(const GridFunction& f, const Weight& w, const GridCube& q, double p);

struct TailProfile {
    std::vector<double> t;
    std::vector<double> mass;  ///< w({r > t}) / w(Q)
    double fitted_rate = 0.0;  ///< slope of log(mass) against t
    double fitted_intercept = 0.0;
    bool fit_available = false;
    std::size_t fit_samples = 0;
};

inline constexpr double kTailFitLow = 1e-4;
inline constexpr double kTailFitHigh = 0.5;

/// 0 followed by the distinct positive values of r, ascending: every jump of
/// the distribution function gets one sample.
std::vector<double> default_t_grid(std::span<const double> ratio);

/// Weighted distribution of the ratio over Q with a least-squares fit of
/// log mass on the samples with mass in [1e-4, 0.5]; fewer than three such
/// samples leaves the fit unavailable.
TailProfile tail_profile(std::span<const double> ratio, const Weight& w, const GridCube& q,
                         std::optional<std::vector<double>> t_grid = std::nullopt);
TailProfile tail_profile(const Fields& fields, const Weight& w, const GridCube& q,
                         std::optional<std::vector<double>> t_grid = std::nullopt);

struct GoodLambda {
    double mass = 0.0;        ///< w({Mf - min_Q Mf > lambda, M#f <= gamma lambda}) / w(Q)
    double bound_mass = 0.0;  ///< w(E_{1/gamma}) / w(Q)
    bool inclusion = false;   ///< the first set lies inside E_{1/gamma}, cell by cell
    bool ok = false;
};

GoodLambda good_lambda(const Fields& fields, const Weight& w, const GridCube& q, double lambda, double gamma);

struct LayerCake {
    double value = 0.0;        ///< (p integral t^(p-1) mass(t) dt)^(1/p), trapezoid rule
    double error_bound = 0.0;  ///< bound on |value^p - exact^p| from monotonicity on each panel
};

LayerCake layer_cake_lp(const TailProfile& profile, double p);

inline constexpr double kGammaGrowthBound = 1.2;

struct GammaGrowth {
    double value = 0.0;  ///< Gamma(p+1)^(1/p) / p
    bool ok = false;
};

GammaGrowth gamma_growth_check(double p);

/// One member of the function family the BLO_w / BMO supremum runs over.
struct XMember {
    std::string name;
    GridFunction f;
    std::optional<GridFunction> analytic_mf;  ///< replaces the grid Mf when set
    std::optional<double> bmo;                ///< cached ||f||_BMO (all cubes)
};

struct XRow {
    std::string name;
    double blo_w = 0.0;
    double bmo = 0.0;
    double ratio = 0.0;
    GridCube witness;
    bool analytic = false;
};

struct XEstimate {
    double x_hat = 0.0;
    std::string argmax;
    std::vector<XRow> rows;
};

/// max over the corpus of ||Mf||_BLO_w / ||f||_BMO (all cubes).
XEstimate x_estimate(const Weight& w, std::span<const XMember> corpus, BoundaryMode mode);

/// Adds to `base` the analytic half-space members (both sides of the central
/// hyperplane on every axis) and b = log+ v for v the Coifman-Rochberg weight
/// of each dyadic cube with side >= N / side_divisor. Constant b are skipped.
std::vector<XMember> x_corpus(const Weight& w, std::span<const XMember> base, BoundaryMode mode, int side_divisor);

struct CharLowerBound {
    double value = 0.0;  ///< w(Q cap H) / w(Q) for the favorable side
    bool complement = false;
    bool ok = false;
};

/// Whole domain as Q, central hyperplane across axis 0, side chosen so that
/// w(Q cap H) >= w(Q)/2.
CharLowerBound char_lower_bound(const Weight& w);

}  // namespace oslx

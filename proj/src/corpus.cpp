// SPDX-License-Identifier: Apache-2.0
#include "oslx/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oslx/error.hpp"
#include "oslx/operators.hpp"

namespace oslx {

namespace {

std::size_t cell_count(int n, int dim) {
    return dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
}

void require_grid(int n, int dim) {
    if (dim != 1 && dim != 2) throw Error(ErrorCode::validation, "dimension must be 1 or 2");
    if (!is_power_of_two(n)) throw Error(ErrorCode::validation, "resolution must be a power of two");
}

// Distance from the center of `cell` to `center`, clamped at half a cell.
double clamped_distance(int n, int dim, Cell cell, std::array<double, 2> center) {
    double d2 = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double x = (cell[k] + 0.5) / n - center[k];
        d2 += x * x;
    }
    return std::max(std::sqrt(d2), 0.5 / n);
}

template <typename Fn>
std::vector<double> tabulate(int n, int dim, Fn&& fn) {
    std::vector<double> v(cell_count(n, dim));
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Cell c = dim == 1 ? Cell{static_cast<int>(i), 0}
                                : Cell{static_cast<int>(i / n), static_cast<int>(i % n)};
        v[i] = fn(c);
    }
    return v;
}

}  // namespace

AnalyticExample half_space_example(int n, int dim, int axis, int boundary_cell, bool complement) {
    require_grid(n, dim);
    if (axis < 0 || axis >= dim) throw Error(ErrorCode::validation, "axis out of range");
    if (boundary_cell <= 0 || boundary_cell >= n) {
        throw Error(ErrorCode::validation, "hyperplane must cut the domain: 0 < boundary < N");
    }
    auto in_h = [&](Cell c) { return (c[axis] >= boundary_cell) != complement; };
    AnalyticExample out{
        GridFunction(dim, n, tabulate(n, dim, [&](Cell c) { return in_h(c) ? 2.0 : 0.0; })),
        GridFunction(dim, n, tabulate(n, dim, [&](Cell c) { return in_h(c) ? 2.0 : 1.0; })),
        "f = 2 chi_H; Mf = 2 on H and 1 off H over R^n",
    };
    return out;
}

GridFunction log_abs_demo(int n, int dim, std::array<double, 2> center) {
    require_grid(n, dim);
    for (int k = 0; k < dim; ++k) {
        if (!(center[k] > 0.0 && center[k] < 1.0)) {
            throw Error(ErrorCode::validation, "center must lie strictly inside the domain");
        }
    }
    return GridFunction(dim, n, tabulate(n, dim, [&](Cell c) { return std::log(clamped_distance(n, dim, c, center)); }));
}

LogAbsGrowth log_abs_growth(int n, double offset, std::span<const int> caps) {
    require_grid(n, 1);
    LogAbsGrowth out;
    const int shift = static_cast<int>(std::lround(offset * n));
    for (int cap : caps) {
        if (!is_power_of_two(cap)) throw Error(ErrorCode::validation, "window widths must be powers of two");
        const int cells = n * cap;
        const double h = 1.0 / n;
        std::vector<double> v(cells);
        for (int i = 0; i < cells; ++i) {
            const double x = -0.5 * cap + (i + 0.5) * h;
            v[i] = std::log(std::max(std::abs(x), 0.5 * h));
        }
        const GridFunction f(1, cells, std::move(v));
        const auto mf = maximal(f, BoundaryMode::restricted);
        const int center_cell = cells / 2;
        const int offset_cell = std::clamp(center_cell + shift, 0, cells - 1);
        double mean = 0.0;
        for (double x : f.values()) mean += std::abs(x);
        out.caps.push_back(cap);
        out.center_value.push_back(mf.values[center_cell]);
        out.offset_value.push_back(mf.values[offset_cell]);
        out.window_mean.push_back(mean / cells);
    }
    return out;
}

Weight power_weight(int n, int dim, double exponent, std::array<double, 2> center) {
    require_grid(n, dim);
    if (!(exponent > -dim)) throw Error(ErrorCode::validation, "power weight needs exponent > -dim");
    return Weight(GridFunction(dim, n, tabulate(n, dim, [&](Cell c) {
                      return std::pow(clamped_distance(n, dim, c, center), exponent);
                  })),
                  true);
}

Weight two_valued_weight(int n, int dim, double k) {
    require_grid(n, dim);
    if (!(k > 0.0)) throw Error(ErrorCode::validation, "two-valued weight needs k > 0");
    return Weight(GridFunction(dim, n, tabulate(n, dim, [&](Cell c) { return c[0] < n / 2 ? 1.0 : k; })));
}

Weight spike_weight(int n, int dim, double k, std::array<double, 2> center) {
    require_grid(n, dim);
    if (!(k > 0.0)) throw Error(ErrorCode::validation, "spike weight needs k > 0");
    auto index = [n](double x) { return std::clamp(static_cast<int>(std::floor(x * n)), 0, n - 1); };
    const Cell spike{index(center[0]), dim == 1 ? 0 : index(center[1])};
    return Weight(GridFunction(dim, n, tabulate(n, dim, [&](Cell c) { return c == spike ? k : 1.0; })));
}

GridFunction random_dyadic_bmo(int n, int dim, int depth, double amplitude, std::uint64_t seed) {
    require_grid(n, dim);
    if (depth < 0 || (1 << depth) > n) throw Error(ErrorCode::validation, "depth must satisfy 2^depth <= N");
    Rng rng(seed);
    std::vector<double> v(cell_count(n, dim), 0.0);
    for (int level = 1; level <= depth; ++level) {
        const int side = n >> level;
        const int blocks = 1 << level;
        const int rows = dim == 1 ? 1 : blocks;
        for (int b0 = 0; b0 < blocks; ++b0) {
            for (int b1 = 0; b1 < rows; ++b1) {
                const double s = rng.coin() ? amplitude : -amplitude;
                const GridCube block{dim, {b0 * side, dim == 1 ? 0 : b1 * side}, side};
                for_each_cell(block, [&](Cell c) {
                    v[dim == 1 ? c[0] : static_cast<std::size_t>(c[0]) * n + c[1]] += s;
                });
            }
        }
    }
    return GridFunction(dim, n, std::move(v));
}

Weight a1_family(int n, int dim, double delta, std::uint64_t seed) {
    require_grid(n, dim);
    if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::validation, "a1 family needs 0 < delta < 1");
    Rng rng(seed);
    std::vector<double> mu(cell_count(n, dim), 0.0);
    const double density = dim == 1 ? n : static_cast<double>(n) * n;
    auto add = [&](Cell c) { mu[dim == 1 ? c[0] : static_cast<std::size_t>(c[0]) * n + c[1]] += density; };
    add(Cell{n / 2, dim == 1 ? 0 : n / 2});
    const int extra = static_cast<int>(seed % 3);
    for (int k = 0; k < extra; ++k) add(Cell{rng.between(0, n - 1), dim == 1 ? 0 : rng.between(0, n - 1)});
    const auto m = maximal(GridFunction(dim, n, std::move(mu)), BoundaryMode::restricted);
    return Weight(m.values.map([delta](double v) { return std::pow(v, delta); }), true);
}

nlohmann::ordered_json to_json(const GeneratorSpec& spec) {
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : spec.params) params[k] = v;
    return nlohmann::ordered_json{
        {"generator", spec.generator}, {"n", spec.n}, {"dim", spec.dim}, {"params", params}, {"seed", spec.seed},
    };
}

GeneratorSpec generator_spec_from_json(const nlohmann::json& j) {
    GeneratorSpec spec;
    spec.generator = j.at("generator").get<std::string>();
    spec.n = j.at("n").get<int>();
    spec.dim = j.at("dim").get<int>();
    if (j.contains("params")) {
        for (const auto& [k, v] : j.at("params").items()) spec.params[k] = v.get<double>();
    }
    spec.seed = j.value("seed", std::uint64_t{0});
    return spec;
}

bool is_weight_generator(const std::string& generator) noexcept {
    return generator == "power-weight" || generator == "two-valued" || generator == "spike" ||
           generator == "a1-family";
}

GridFunction generate(const GeneratorSpec& spec) {
    const int n = spec.n;
    const int dim = spec.dim;
    auto center = [&]() { return std::array<double, 2>{spec.param("cx", 0.5), spec.param("cy", 0.5)}; };
    const std::string& g = spec.generator;
    if (g == "half-space" || g == "analytic-half-space") {
        auto ex = half_space_example(n, dim, static_cast<int>(spec.param("axis", 0)),
                                     static_cast<int>(spec.param("boundary", n / 2)), spec.param("complement", 0) != 0);
        return g == "half-space" ? ex.grid_values : ex.analytic_maximal;
    }
    if (g == "log-abs") return log_abs_demo(n, dim, center());
    if (g == "power-weight") return power_weight(n, dim, spec.param("a", 1.0), center()).function();
    if (g == "two-valued") return two_valued_weight(n, dim, spec.param("k", 8.0)).function();
    if (g == "spike") return spike_weight(n, dim, spec.param("k", 1e6), center()).function();
    if (g == "random-bmo") {
        return random_dyadic_bmo(n, dim, static_cast<int>(spec.param("depth", 4)), spec.param("amplitude", 1.0),
                                 spec.seed);
    }
    if (g == "a1-family") return a1_family(n, dim, spec.param("delta", 0.5), spec.seed).function();
    if (g == "constant") return GridFunction::constant(dim, n, spec.param("value", 1.0));
    throw Error(ErrorCode::validation, "unknown generator '" + g + "'");
}

}  // namespace oslx

// SPDX-License-Identifier: Apache-2.0
#include "oslx/report.hpp"

#include <algorithm>
#include <cmath>

#include "oslx/grid_io.hpp"

namespace oslx {

namespace {

void dump(const Json& j, int indent, int depth, std::string& out) {
    const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ',';
                first = false;
                out += pad;
                out += Json(key).dump();
                out += indent > 0 ? ": " : ":";
                dump(value, indent, depth + 1, out);
            }
            out += close;
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            const bool flat = std::none_of(j.begin(), j.end(), [](const Json& v) { return v.is_structured(); });
            out += '[';
            bool first = true;
            for (const auto& value : j) {
                if (!first) out += flat && indent > 0 ? ", " : ",";
                first = false;
                if (!flat) out += pad;
                dump(value, indent, depth + 1, out);
            }
            if (!flat) out += close;
            out += ']';
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_number(v) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
    std::string out;
    dump(j, indent, 0, out);
    out += '\n';
    return out;
}

Json to_json(const GridCube& q) {
    Json anchor = Json::array({q.anchor[0]});
    if (q.dim == 2) anchor.push_back(q.anchor[1]);
    return Json{{"anchor", anchor}, {"side", q.side}};
}

Json to_json(const SeminormReport& r, BoundaryMode mode) {
    return Json{{"value", r.value},
                {"witness", to_json(r.witness)},
                {"family", std::string(to_string(r.family))},
                {"mode", std::string(to_string(mode))}};
}

Json to_json(const WeightConstants& c) {
    Json a1_witness = Json::array({c.a1.witness[0]});
    if (c.a_infty_witness.dim == 2) a1_witness.push_back(c.a1.witness[1]);
    return Json{{"a1", c.a1.value},
                {"a1_finite", c.a1.finite},
                {"a_infty", c.a_infty},
                {"mode", std::string(to_string(c.mode))},
                {"family", std::string(to_string(c.family))},
                {"witnesses", Json{{"a1_cell", a1_witness}, {"a_infty_cube", to_json(c.a_infty_witness)}}}};
}

Json to_json(const RatioRecord& r) {
    return Json{{"f", r.f_ref},
                {"w", r.w_ref},
                {"cube", to_json(r.cube)},
                {"p", r.p},
                {"lhs", r.lhs},
                {"a_infty", r.a_infty},
                {"normalized", r.normalized},
                {"mode", std::string(to_string(r.mode))},
                {"family", std::string(to_string(r.family))}};
}

Json summary_json(const TailProfile& profile) {
    Json j{{"samples", profile.t.size()},
           {"fit_available", profile.fit_available},
           {"fit_samples", profile.fit_samples},
           {"fitted_rate", profile.fitted_rate},
           {"fitted_intercept", profile.fitted_intercept}};
    if (!profile.t.empty()) {
        j["t_max"] = profile.t.back();
        j["mass_at_zero"] = profile.mass.front();
    }
    return j;
}

std::string tail_csv(const TailProfile& profile) {
    std::string out = "t,mass,fitted_rate\n";
    const std::string rate = profile.fit_available ? format_number(profile.fitted_rate) : "";
    for (std::size_t i = 0; i < profile.t.size(); ++i) {
        out += format_number(profile.t[i]);
        out += ',';
        out += format_number(profile.mass[i]);
        out += ',';
        out += rate;
        out += '\n';
    }
    return out;
}

}  // namespace oslx

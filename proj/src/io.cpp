#include "wkit/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace wkit {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void dump(std::ostringstream& out, const Json& j, int depth) {
    const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out << "{}";
                return;
            }
            out << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out << ",\n";
                first = false;
                out << pad << Json(it.key()).dump() << ": ";
                dump(out, it.value(), depth + 1);
            }
            out << "\n" << close << "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out << "[]";
                return;
            }
            // Numeric arrays stay on one line.
            const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_number(); });
            out << (flat ? "[" : "[\n");
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out << (flat ? ", " : ",\n");
                if (!flat) out << pad;
                dump(out, j[i], depth + 1);
            }
            out << (flat ? "]" : "\n" + close + "]");
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            out << (std::isfinite(v) ? format_number(v) : "\"" + format_number(v) + "\"");
            return;
        }
        default:
            out << j.dump();
    }
}

}  // namespace

std::string dump_json(const Json& j) {
    std::ostringstream out;
    dump(out, j, 0);
    out << "\n";
    return out.str();
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
        out << "\n";
    }
}

void write_curve_csv(std::ostream& out, const std::vector<ProjectiveCurveSample>& curve) {
    std::vector<std::vector<double>> rows;
    for (const auto& s : curve) rows.push_back({s.t, s.v[0], s.v[1], s.v[2]});
    write_csv(out, {"t", "v1", "v2", "v3"}, rows);
}

void write_incidence_csv(std::ostream& out, const std::vector<IncidenceCurveSample>& curve) {
    out << "s,R1,R2,R3,error\n";
    for (const auto& s : curve) {
        out << format_number(s.s);
        if (s.R)
            for (int i = 0; i < 3; ++i) out << "," << format_number((*s.R)[i]);
        else
            out << ",,,";
        // Errors are free text; keep them on one CSV field.
        std::string e = s.error;
        for (char& c : e)
            if (c == ',' || c == '\n') c = ';';
        out << "," << e << "\n";
    }
}

void write_geodesic_csv(std::ostream& out, const std::vector<GeodesicSample>& geodesic) {
    std::vector<std::vector<double>> rows;
    for (const auto& g : geodesic) rows.push_back({g.t, g.q[0], g.q[1], g.q[2], g.p[0], g.p[1], g.p[2], g.H, g.L});
    write_csv(out, {"t", "q1", "q2", "q3", "p1", "p2", "p3", "H", "L"}, rows);
}

void write_conic_family_csv(std::ostream& out, const ConicFamily& fam, const std::vector<double>& ts) {
    std::vector<std::vector<double>> rows;
    for (double t : ts) {
        const Mat3 a = fam(t);
        rows.push_back({t, a(0, 0), a(1, 1), a(2, 2), a(0, 1), a(0, 2), a(1, 2)});
    }
    write_csv(out, {"t", "a11", "a22", "a33", "a12", "a13", "a23"}, rows);
}

Json to_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

Json to_json(const Mat3& m) {
    Json j = Json::array();
    for (int i = 0; i < 3; ++i) j.push_back(Json::array({m(i, 0), m(i, 1), m(i, 2)}));
    return j;
}

Json to_json(const Mat4& m) {
    Json j = Json::array();
    for (int i = 0; i < 4; ++i) j.push_back(Json::array({m(i, 0), m(i, 1), m(i, 2), m(i, 3)}));
    return j;
}

Json to_json(const AxiomReport& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks)
        checks.push_back(Json{{"axiom", c.axiom},
                              {"pass", c.pass},
                              {"residual", c.residual},
                              {"tolerance", c.tolerance},
                              {"detail", c.detail}});
    return Json{{"all_pass", r.all_pass()}, {"checks", checks}};
}

Json to_json(const InverseReport& r) {
    Json j{{"tag", to_string(r.tag)}, {"rank", r.rank.rank}, {"message", r.message}};
    j["singular_values"] = Json::array();
    for (int k = 0; k < 5; ++k) j["singular_values"].push_back(r.rank.singular_values[k]);
    j["gap"] = r.rank.gap;
    j["point"] = r.point ? to_json(*r.point) : Json(nullptr);
    if (r.recovery) {
        j["recovery"] = Json{{"rank_one", r.recovery->rank_one},
                             {"minor_residual", r.recovery->minor_residual},
                             {"trace_residual", r.recovery->trace_residual},
                             {"X", to_json(r.recovery->X)}};
    }
    if (r.rank2) {
        Json pts = Json::array();
        for (const auto& p : r.rank2->points) pts.push_back(to_json(p));
        j["rank2"] = Json{{"diagonalizable", r.rank2->diagonalizable},
                          {"M", to_json(r.rank2->M)},
                          {"x", to_json(r.rank2->x)},
                          {"points", pts},
                          {"trace_residual", r.rank2->trace_residual}};
    }
    return j;
}

Json to_json(const RegularityCheck& r) {
    return Json{{"det_hessian", r.det_hessian},
                {"det_abc", r.det_abc},
                {"relative_error_square", r.relative_error},
                {"relative_error_cubic", r.relative_error_cubic},
                {"structure_error", r.structure_error},
                {"hessian", to_json(r.hessian)}};
}

Json to_json(const GeodesicComparison& c) {
    Json j{{"x_incidence", c.x_inc},
           {"hausdorff", c.hausdorff},
           {"h_drift", c.h_drift},
           {"max_abs_L", c.max_abs_L}};
    if (c.endpoint)
        j["endpoint"] = Json{{"x", c.endpoint->x}, {"df", c.endpoint->df}, {"dfx", c.endpoint->dfx}};
    else
        j["endpoint"] = nullptr;
    return j;
}

}  // namespace wkit

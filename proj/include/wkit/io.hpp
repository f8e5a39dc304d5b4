#pragma once

// CSV emitters and JSON conversion for reports.
//
// CSV files start with a header line; numbers are written with 17
// significant digits. Column layouts:
//   projective curve   t,v1,v2,v3            (unit vector, first nonzero > 0)
//   incidence curve    s,R1,R2,R3,error      (R empty when the sample failed)
//   geodesic           t,q1,q2,q3,p1,p2,p3,H,L
//   conic family       t,a11,a22,a33,a12,a13,a23

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "wkit/causal.hpp"
#include "wkit/conic.hpp"
#include "wkit/hamilton.hpp"
#include "wkit/inverse.hpp"

namespace wkit {

using Json = nlohmann::ordered_json;

// Deterministic JSON text: two-space indent, keys in insertion order,
// numbers with 17 significant digits, non-finite numbers as the strings
// "inf", "-inf" and "nan".
std::string dump_json(const Json& j);

std::string format_number(double v);

void write_csv(std::ostream& out, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

void write_curve_csv(std::ostream& out, const std::vector<ProjectiveCurveSample>& curve);
void write_incidence_csv(std::ostream& out, const std::vector<IncidenceCurveSample>& curve);
void write_geodesic_csv(std::ostream& out, const std::vector<GeodesicSample>& geodesic);
void write_conic_family_csv(std::ostream& out, const ConicFamily& fam, const std::vector<double>& ts);

Json to_json(const Vec3& v);
Json to_json(const Mat3& m);
Json to_json(const Mat4& m);
Json to_json(const AxiomReport& r);
Json to_json(const InverseReport& r);
Json to_json(const RegularityCheck& r);
Json to_json(const GeodesicComparison& c);

}  // namespace wkit

#pragma once

// JSON documents for models, curvature data and probe reports, and the CSV
// trajectory format.
//
// ZeroModel document:
//   {"dim": m, "inner": [m*m numbers, row-major] or [[...], ...],
//    "entries": [[i, j, k, l, value], ...]}
// Indices in "entries" are 1-based. Each entry is completed by the pair and
// antisymmetries on load; two entries forcing different values on the same
// component are an error. The writer emits one representative per orbit:
// i < j, k < l, (i, j) <= (k, l).
//
// Trajectory CSV columns, in order:
//   affine_param, x1..xn, v1..vn, speed_norm, monitor
// with a header row naming the chart coordinates.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "skt/catalog.hpp"
#include "skt/chart.hpp"
#include "skt/geodesic.hpp"
#include "skt/zero_model.hpp"

namespace skt {

using Json = nlohmann::json;

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Json to_json(const Signature& s);

Json model_to_json(const ZeroModel& model);
/// Throws ModelError for malformed documents or conflicting entries.
ZeroModel model_from_json(const Json& doc);

Json to_json(const CurvatureData& data);
Json to_json(const SymmetryReport& r);
Json to_json(const CommutatorReport& r);
Json to_json(const NilpotencyReport& r);
Json to_json(const BlockDecomposition& d);
Json to_json(const GeodesicEvent& e);
Json to_json(const IntegrateOptions& o);
Json to_json(const ProbeReport& r);
Json to_json(const CoverageReport& r);
Json to_json(const FamilySpec& spec);

/// One row per recorded sample, 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Chart& chart, const GeodesicTrajectory& traj);

}  // namespace skt

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nahm/dynamics_energy.hpp"
#include "nahm/nahm_expansion.hpp"

namespace nahm {

using Json = nlohmann::json;

/// Row-major 9-number array.
Json matrix_json(const Mat3& m);
Mat3 matrix_from_json(const Json& j);

/// Keys "alpha[k][l]" plus alpha0, alphaMinus1 and the order.
Json expansion_json(const ConnectionExpansion& e);
Json obstruction_json(const Obstruction& o);
Json energy_json(const EnergyReport& r);

/// New report object carrying the schema version and the command name.
Json report_header(const std::string& command);

/// Canonical text: sorted keys, two-space indent, shortest round-trip floats.
std::string dump_report(const Json& j);

/// Short human-readable matrix, one row per line.
std::string format_matrix(const Mat3& m, int indent = 2);

}  // namespace nahm

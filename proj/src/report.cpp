#include "nahm/report.hpp"

#include <cstdio>
#include <sstream>

namespace nahm {

Json matrix_json(const Mat3& m) {
    Json a = Json::array();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a.push_back(m(i, j) == 0.0 ? 0.0 : m(i, j));  // no -0
    return a;
}

Mat3 matrix_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 9) throw ValidationError("matrix must be a 9-number array");
    Mat3 m;
    for (int n = 0; n < 9; ++n) m(n / 3, n % 3) = j.at(static_cast<size_t>(n)).get<double>();
    return m;
}

Json expansion_json(const ConnectionExpansion& e) {
    Json j = Json::object();
    j["order"] = e.order;
    j["alphaMinus1"] = matrix_json(e.alphaMinus1);
    j["alpha0"] = matrix_json(e.alpha0);
    for (const auto& [key, v] : e.coeffs)
        j["alpha[" + std::to_string(key.first) + "][" + std::to_string(key.second) + "]"] = matrix_json(v);
    j["smooth"] = is_smooth(e);
    return j;
}

Json obstruction_json(const Obstruction& o) {
    return Json{{"recursive", matrix_json(o.recursive)}, {"weyl", matrix_json(o.weyl)}, {"maxDiff", o.maxDiff}};
}

Json energy_json(const EnergyReport& r) {
    Json l = Json::object();
    for (const auto& [p, c] : r.laurent) l[std::to_string(p)] = c;
    Json table = Json::array();
    for (size_t i = 0; i < r.t.size(); ++i)
        table.push_back(Json{{"t", r.t[i]}, {"energy", r.energy[i]}, {"boundary", r.boundary[i]}});
    return Json{{"laurent", l},
                {"fitResidual", r.fitResidual},
                {"csValue", r.csValue},
                {"stokesResidual", r.stokesResidual},
                {"samples", table}};
}

Json report_header(const std::string& command) { return Json{{"schema", "1"}, {"command", command}}; }

std::string dump_report(const Json& j) { return j.dump(2) + "\n"; }

std::string format_matrix(const Mat3& m, int indent) {
    std::ostringstream os;
    char buf[64];
    for (int i = 0; i < 3; ++i) {
        os << std::string(static_cast<size_t>(indent), ' ');
        for (int j = 0; j < 3; ++j) {
            const double v = m(i, j) == 0.0 ? 0.0 : m(i, j);
            std::snprintf(buf, sizeof buf, "%14.6e", v);
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace nahm

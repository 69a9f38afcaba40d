#include "nahm/presets.hpp"

#include <cmath>
#include <cstdlib>

namespace nahm {

FrameModel berger_frame(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("Berger parameter must be positive");
    Mat3 H = Mat3::Identity();
    H(0, 0) = lambda * lambda;
    return FrameModel::round_sphere().orthonormalized(H);
}

MetricJet pe_jet(const FrameModel& frame) {
    MetricJet m;
    m.H = {Mat3::Identity(), Mat3::Zero(), -intrinsic_geometry(frame, Mat3::Identity()).schouten};
    m.exact = true;
    return m;
}

Geometry make_preset(const std::string& name, const Mat3* h2) {
    if (name == "t3-flat") return {name, FrameModel::flat_torus(), MetricJet::product()};
    if (name == "s3-hyperbolic") return {name, FrameModel::round_sphere(), MetricJet::hyperbolic_ball()};
    if (name == "t3-h2") {
        Mat3 h = Mat3::Zero();
        h(0, 0) = 1.0;
        h(1, 1) = -1.0;
        if (h2) h = *h2;
        MetricJet m;
        m.H = {Mat3::Identity(), Mat3::Zero(), h};
        m.exact = true;
        m.validate();
        return {name, FrameModel::flat_torus(), m};
    }
    if (name.rfind("berger:", 0) == 0) {
        const std::string arg = name.substr(7);
        char* end = nullptr;
        const double lambda = std::strtod(arg.c_str(), &end);
        if (arg.empty() || end != arg.c_str() + arg.size())
            throw ValidationError("bad Berger parameter '" + arg + "'");
        const FrameModel f = berger_frame(lambda);
        return {name, f, pe_jet(f)};
    }
    throw ValidationError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"t3-flat", "s3-hyperbolic", "t3-h2", "berger:<lambda>"}; }

std::string preset_description(const std::string& name) {
    if (name == "t3-flat") return "flat torus, product collar h(x) = I";
    if (name == "s3-hyperbolic") return "round S^3, hyperbolic ball h(x) = (1 - x^2/4)^2 I";
    if (name == "t3-h2") return "flat torus, h(x) = I + h2 x^2 (default h2 = diag(1,-1,0))";
    if (name.rfind("berger", 0) == 0) return "Berger sphere diag(lambda^2,1,1), h(x) = I - P x^2";
    return "";
}

}  // namespace nahm

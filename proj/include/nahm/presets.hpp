#pragma once

#include <string>
#include <vector>

#include "nahm/collar_geometry.hpp"
#include "nahm/frame_algebra.hpp"

namespace nahm {

struct Geometry {
    std::string name;
    FrameModel frame;
    MetricJet metric;
};

/// Names: t3-flat, s3-hyperbolic, t3-h2, berger:<lambda>.
/// t3-h2 takes h2 from `h2` (symmetric, trace-free recommended); default diag(1,-1,0).
Geometry make_preset(const std::string& name, const Mat3* h2 = nullptr);

std::vector<std::string> preset_names();
std::string preset_description(const std::string& name);

/// Round S^3 frame orthonormalized for diag(lambda^2, 1, 1).
FrameModel berger_frame(double lambda);

/// h(x) = I - P x^2 with P the Schouten tensor of the frame's unit metric.
MetricJet pe_jet(const FrameModel& frame);

}  // namespace nahm

#pragma once

#include <array>
#include <vector>

#include "nahm/frame_algebra.hpp"
#include "nahm/log_series.hpp"

namespace nahm {

/// h(x) = sum_k H_k x^k in geodesic normal form, H_0 = I.
/// With `exact` set the listed coefficients are the whole polynomial, so the
/// jet is known to any order; otherwise it is known through H.size()-1.
struct MetricJet {
    std::vector<Mat3> H;
    bool exact = false;

    static MetricJet product(int order = 0);  // h(x) = I, exact
    /// (1 - x^2/4)^2 I, the hyperbolic ball written over the round S^3.
    static MetricJet hyperbolic_ball();

    void validate() const;
    int known_order() const;  // large sentinel when exact
    bool known_to(int order) const { return known_order() >= order; }
    Mat3 coeff(int k) const;
    MatSeries series(int order) const;
    Mat3 evaluate(double x) const;
    Mat3 evaluate_derivative(double x) const;

    /// Jet of the same collar in the frame rescaled for h0 -> lambda^2 h0.
    MetricJet conformal_rescale(double lambda) const;
};

struct ExtrinsicJets {
    MatSeries shape;        // S = -1/2 H^{-1} H'
    ScalarSeries meanCurv;  // tr S
    MatSeries normalCurv;   // S' - S^2
    MatSeries star;         // sqrt(det H) H^{-1}, 1-forms to 2-forms
    MatSeries starInv;      // H / sqrt(det H), 2-forms to 1-forms
};

/// Jets through `order` (shape and normalCurv lose one and two orders).
ExtrinsicJets extrinsic_jets(const MetricJet& m, int order);

struct IntrinsicGeometry {
    using Christoffel = std::array<std::array<std::array<double, 3>, 3>, 3>;  // [m][i][j]
    Christoffel gamma{};  // nabla_{e_i} e_j = gamma[m][i][j] e_m
    Mat3 spinConn = Mat3::Zero();  // in the H-orthonormal frame
    Mat3 ricci = Mat3::Zero();
    double scalar = 0.0;
    Mat3 einstein = Mat3::Zero();
    Mat3 schouten = Mat3::Zero();
};

IntrinsicGeometry intrinsic_geometry(const FrameModel& frame, const Mat3& H);

struct WeylParts {
    Mat3 wE;
    Mat3 wB;
};

WeylParts weyl_EB(const FrameModel& frame, const MetricJet& m);

/// Order 1: h1 = 0. Order 2: also h2 = -P(h0). Order 3: also tr h3 = 0.
std::vector<bool> check_pe(const FrameModel& frame, const MetricJet& m, int order, double tol = 1e-12);

}  // namespace nahm

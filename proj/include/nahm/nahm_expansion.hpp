#pragma once

#include <map>
#include <utility>

#include "nahm/collar_geometry.hpp"
#include "nahm/frame_algebra.hpp"
#include "nahm/log_series.hpp"

namespace nahm {

struct BoundaryData {
    FrameModel frame;
    MetricJet metric;
    Mat3 sigma = Mat3::Zero();  // the free symmetric trace-free part of alpha_1
    int order = 2;

    void validate() const;
};

struct ConnectionExpansion {
    Mat3 alphaMinus1 = Mat3::Identity();
    Mat3 alpha0 = Mat3::Zero();
    std::map<std::pair<int, int>, Mat3> coeffs;  // (k, l), 1 <= k <= order
    int order = 0;

    Mat3 coeff(int k, int l) const;
    /// alpha(x) = theta/x + alpha0 + sum alpha_{k,l} x^k (log x)^l
    MatSeries series() const;
    Mat3 evaluate(double x) const { return series().evaluate(x); }
};

/// Largest log power the expansion can carry at x^k.
constexpr int log_cap(int k) { return (k + 1) / 2; }

enum class ResidueTag { Zero, NahmPole, Invalid };

struct ResidueClass {
    ResidueTag tag = ResidueTag::Invalid;
    Mat3 rotation = Mat3::Identity();
};

ResidueClass classify_residue(const Mat3& R, double tol = 1e-9);

/// Connection whose torsion against the soldering form is T.
Mat3 solve_torsion(const Mat3& T, const IntrinsicGeometry& intrinsic);

Mat3 alpha0(const FrameModel& frame, const MetricJet& m);

/// Solves k a + tr(a) I - a^T = T for k >= 2.
Mat3 solve_model(int k, const Mat3& T);

ConnectionExpansion expand(const BoundaryData& data);

/// d/dx alpha + star(x) f_alpha as a series; `order` bounds the metric jets used.
MatSeries self_duality_residual(const MatSeries& alpha, const FrameModel& frame, const MetricJet& m, int order);

/// Field strength of a connection series on the homogeneous frame, as a
/// valued 2-form series.
MatSeries curvature_series(const MatSeries& alpha, const FrameModel& frame);

struct Obstruction {
    Mat3 recursive;
    Mat3 weyl;
    double maxDiff = 0.0;
};

Obstruction obstruction(const FrameModel& frame, const MetricJet& m);

/// Half the trace-free Ricci endomorphism of H on the frame.
Mat3 spin_boundary_value(const FrameModel& frame, const Mat3& H);

bool is_smooth(const ConnectionExpansion& e, double tol = 1e-10);

/// Expansion for a residue R in SO(3): every coefficient rotated by R.
ConnectionExpansion apply_residue(const ConnectionExpansion& e, const Mat3& R);

}  // namespace nahm

#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nahm {

// Everything su(2)-valued is stored through sigma_i/2 -> e_i, so the Lie
// bracket is the cross product.
//
// A valued 1-form M has M(i, j) = coefficient of theta^j (x) sigma_i/2.
// A valued 2-form uses the basis (t2^t3, t3^t1, t1^t2) on the column index.
// An endomorphism of TY uses the frame e_j on columns; the soldering form is
// the identity matrix in all three readings.
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Input violates a documented precondition (bad shape, not positive
/// definite, wrong normalization, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical procedure could not deliver (integration underflow, rank
/// deficient fit, ...).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Levi-Civita symbol on {0,1,2}.
constexpr int levi_civita(int i, int j, int k) {
    return (i == j || j == k || i == k) ? 0 : (((j - i + 3) % 3 == 1) ? 1 : -1);
}

struct Decomp {
    Mat3 sk;
    Mat3 symtf;
    double trace = 0.0;

    Mat3 recompose() const { return sk + symtf + (trace / 3.0) * Mat3::Identity(); }
};

Decomp decompose(const Mat3& m);

inline Mat3 skew_part(const Mat3& m) { return 0.5 * (m - m.transpose()); }
inline Mat3 sym_part(const Mat3& m) { return 0.5 * (m + m.transpose()); }
/// m - (tr m / 3) I, with no symmetrization.
inline Mat3 trace_free(const Mat3& m) { return m - (m.trace() / 3.0) * Mat3::Identity(); }
inline Mat3 symtf(const Mat3& m) { return trace_free(sym_part(m)); }

/// Structure constants c^k_ij of a global frame, [e_i, e_j] = c^k_ij e_k,
/// equivalently d theta^k = -1/2 c^k_ij theta^i ^ theta^j, together with the
/// total volume of theta^1 ^ theta^2 ^ theta^3.
class FrameModel {
public:
    using Constants = std::array<std::array<std::array<double, 3>, 3>, 3>;  // [k][i][j]

    FrameModel();
    FrameModel(const Constants& c, double volume);

    static FrameModel flat_torus(double volume = 1.0);
    /// Left-invariant frame of the unit round S^3: c^k_ij = 2 eps_ijk, volume 2 pi^2.
    static FrameModel round_sphere();

    double c(int k, int i, int j) const { return c_[k][i][j]; }
    const Constants& constants() const { return c_; }
    double volume() const { return volume_; }

    /// Max |cyclic sum [[e_i,e_j],e_k]| over all index triples.
    double jacobi_defect() const;

    /// Matrix of d theta in the 2-form basis: d theta^b = sum_a D(b, a) beta_a.
    Mat3 d_theta() const { return d_theta_; }

    /// Same manifold, frame replaced by e' = e H^{-1/2}, which is orthonormal
    /// for the metric whose Gram matrix in the old frame is H.
    FrameModel orthonormalized(const Mat3& gram) const;

private:
    Constants c_{};
    double volume_ = 1.0;
    Mat3 d_theta_ = Mat3::Zero();
};

/// Symmetric square root and inverse square root of an SPD matrix.
Mat3 spd_sqrt(const Mat3& h);
Mat3 spd_inv_sqrt(const Mat3& h);
void require_spd(const Mat3& h, const char* what);

/// Hodge star Lambda^1 -> Lambda^2 of the metric with frame Gram matrix H,
/// acting on coefficient columns: sqrt(det H) H^{-1}.
Mat3 hodge1(const Mat3& gram);
/// Hodge star Lambda^2 -> Lambda^1, the inverse of hodge1: H / sqrt(det H).
Mat3 hodge2(const Mat3& gram);

/// [g ^ d] for valued 1-forms, as a valued 2-form.
Mat3 wedge_bracket(const Mat3& g, const Mat3& d);

/// star applied to 1/2([g^d] + [d^g]). `star0` is the Lambda^1 -> Lambda^2
/// star of the metric; its inverse is the one applied to the 2-form.
Mat3 wedge_bracket_star(const Mat3& g, const Mat3& d, const Mat3& star0);

/// Apply an operator on form coefficients to the form index of a valued form.
inline Mat3 on_form_index(const Mat3& op, const Mat3& valued) { return valued * op.transpose(); }

/// d_w g = dg + [w ^ g] for constant coefficients on the frame.
Mat3 covariant_ext_d(const Mat3& w, const Mat3& g, const FrameModel& frame);

/// f_w = dw + 1/2 [w ^ w].
Mat3 curvature(const Mat3& w, const FrameModel& frame);

/// Cofactor matrix (the adjugate transposed).
Mat3 cofactor(const Mat3& m);

}  // namespace nahm

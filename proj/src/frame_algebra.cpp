#include "nahm/frame_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nahm {

namespace {

Mat3 compute_d_theta(const FrameModel::Constants& c) {
    // d theta^b = -1/2 c^b_ij theta^i ^ theta^j, and theta^i ^ theta^j = eps_ija beta_a.
    Mat3 d = Mat3::Zero();
    for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a) {
            double s = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) s += c[b][i][j] * levi_civita(i, j, a);
            d(b, a) = -0.5 * s;
        }
    return d;
}

}  // namespace

Decomp decompose(const Mat3& m) {
    Decomp out;
    out.sk = skew_part(m);
    out.symtf = symtf(m);
    out.trace = m.trace();
    return out;
}

FrameModel::FrameModel() : FrameModel(Constants{}, 1.0) {}

FrameModel::FrameModel(const Constants& c, double volume) : c_(c), volume_(volume) {
    if (!(volume > 0.0) || !std::isfinite(volume))
        throw ValidationError("frame volume must be positive and finite");
    double scale = 1.0;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                if (!std::isfinite(c[k][i][j])) throw ValidationError("structure constant is not finite");
                if (c[k][i][j] != -c[k][j][i])
                    throw ValidationError("structure constants must be antisymmetric in the lower indices");
                scale = std::max(scale, std::abs(c[k][i][j]));
            }
    if (jacobi_defect() > 1e-14 * scale * scale)
        throw ValidationError("structure constants violate the Jacobi identity");
    d_theta_ = compute_d_theta(c_);
}

FrameModel FrameModel::flat_torus(double volume) { return FrameModel(Constants{}, volume); }

FrameModel FrameModel::round_sphere() {
    Constants c{};
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) c[k][i][j] = 2.0 * levi_civita(i, j, k);
    return FrameModel(c, 2.0 * std::numbers::pi * std::numbers::pi);
}

double FrameModel::jacobi_defect() const {
    // [[e_i,e_j],e_k] + cyclic = (c^m_ij c^n_mk + c^m_jk c^n_mi + c^m_ki c^n_mj) e_n
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int n = 0; n < 3; ++n) {
                    double s = 0.0;
                    for (int m = 0; m < 3; ++m)
                        s += c_[m][i][j] * c_[n][m][k] + c_[m][j][k] * c_[n][m][i] + c_[m][k][i] * c_[n][m][j];
                    worst = std::max(worst, std::abs(s));
                }
    return worst;
}

FrameModel FrameModel::orthonormalized(const Mat3& gram) const {
    require_spd(gram, "frame Gram matrix");
    const Mat3 m = spd_inv_sqrt(gram);  // e'_a = e_b m(b, a)
    const Mat3 minv = spd_sqrt(gram);
    Constants out{};
    for (int p = 0; p < 3; ++p)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k)
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j) s += minv(p, k) * c_[k][i][j] * m(i, a) * m(j, b);
                out[p][a][b] = s;
            }
    // Exact antisymmetry is a constructor invariant; roundoff may break it.
    for (int p = 0; p < 3; ++p)
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) {
                const double v = (a == b) ? 0.0 : 0.5 * (out[p][a][b] - out[p][b][a]);
                out[p][a][b] = v;
                out[p][b][a] = -v;
            }
    return FrameModel(out, volume_ * std::sqrt(gram.determinant()));
}

void require_spd(const Mat3& h, const char* what) {
    if (!h.allFinite()) throw ValidationError(std::string(what) + " is not finite");
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()))
        throw ValidationError(std::string(what) + " is not symmetric");
    Eigen::LLT<Mat3> llt(h);
    if (llt.info() != Eigen::Success) throw ValidationError(std::string(what) + " is not positive definite");
}

Mat3 spd_sqrt(const Mat3& h) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(h);
    return es.operatorSqrt();
}

Mat3 spd_inv_sqrt(const Mat3& h) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(h);
    return es.operatorInverseSqrt();
}

Mat3 hodge1(const Mat3& gram) {
    require_spd(gram, "metric");
    return std::sqrt(gram.determinant()) * gram.inverse();
}

Mat3 hodge2(const Mat3& gram) {
    require_spd(gram, "metric");
    return gram / std::sqrt(gram.determinant());
}

Mat3 wedge_bracket(const Mat3& g, const Mat3& d) {
    // [g ^ d]^k_a = eps_ijk eps_bca g^i_b d^j_c
    Mat3 out = Mat3::Zero();
    for (int k = 0; k < 3; ++k) {
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        for (int a = 0; a < 3; ++a) {
            const int b = (a + 1) % 3, c = (a + 2) % 3;
            // only the (i,j),(j,i) and (b,c),(c,b) pairs survive
            out(k, a) = g(i, b) * d(j, c) - g(i, c) * d(j, b) - g(j, b) * d(i, c) + g(j, c) * d(i, b);
        }
    }
    return out;
}

Mat3 wedge_bracket_star(const Mat3& g, const Mat3& d, const Mat3& star0) {
    const Mat3 two_form = 0.5 * (wedge_bracket(g, d) + wedge_bracket(d, g));
    return on_form_index(star0.inverse(), two_form);
}

Mat3 covariant_ext_d(const Mat3& w, const Mat3& g, const FrameModel& frame) {
    return g * frame.d_theta() + wedge_bracket(w, g);
}

Mat3 curvature(const Mat3& w, const FrameModel& frame) {
    return w * frame.d_theta() + 0.5 * wedge_bracket(w, w);
}

Mat3 cofactor(const Mat3& m) {
    Mat3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
            c(i, j) = m(i1, j1) * m(i2, j2) - m(i1, j2) * m(i2, j1);
        }
    return c;
}

}  // namespace nahm

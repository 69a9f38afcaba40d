#include "nahm/collar_geometry.hpp"

#include <climits>
#include <cmath>
#include <string>

namespace nahm {

namespace {

constexpr int kExactOrder = INT_MAX / 4;

}  // namespace

MetricJet MetricJet::product(int order) {
    MetricJet m;
    m.H.assign(static_cast<size_t>(order) + 1, Mat3::Zero());
    m.H[0] = Mat3::Identity();
    m.exact = true;
    return m;
}

MetricJet MetricJet::hyperbolic_ball() {
    MetricJet m;
    m.H = {Mat3::Identity(), Mat3::Zero(), -0.5 * Mat3::Identity(), Mat3::Zero(), Mat3::Identity() / 16.0};
    m.exact = true;
    return m;
}

void MetricJet::validate() const {
    if (H.empty()) throw ValidationError("metric jet has no coefficients");
    if ((H[0] - Mat3::Identity()).cwiseAbs().maxCoeff() != 0.0)
        throw ValidationError("metric jet must have H_0 = identity");
    for (size_t k = 0; k < H.size(); ++k) {
        if (!H[k].allFinite()) throw ValidationError("metric coefficient H_" + std::to_string(k) + " is not finite");
        if ((H[k] - H[k].transpose()).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, H[k].cwiseAbs().maxCoeff()))
            throw ValidationError("metric coefficient H_" + std::to_string(k) + " is not symmetric");
    }
}

int MetricJet::known_order() const { return exact ? kExactOrder : static_cast<int>(H.size()) - 1; }

Mat3 MetricJet::coeff(int k) const {
    if (k < 0) return Mat3::Zero();
    if (k < static_cast<int>(H.size())) return H[static_cast<size_t>(k)];
    if (exact) return Mat3::Zero();
    throw ValidationError("metric jet not known to order " + std::to_string(k));
}

MatSeries MetricJet::series(int order) const {
    validate();
    MatSeries s(0, std::min(order, known_order()), Mat3::Zero());
    for (int k = 0; k <= s.order() && k < static_cast<int>(H.size()); ++k)
        if (!coeff_is_zero(H[static_cast<size_t>(k)])) s.set(k, 0, H[static_cast<size_t>(k)]);
    return s;
}

Mat3 MetricJet::evaluate(double x) const {
    Mat3 acc = Mat3::Zero();
    double p = 1.0;
    for (const Mat3& h : H) {
        acc += p * h;
        p *= x;
    }
    return acc;
}

Mat3 MetricJet::evaluate_derivative(double x) const {
    Mat3 acc = Mat3::Zero();
    double p = 1.0;
    for (size_t k = 1; k < H.size(); ++k) {
        acc += (static_cast<double>(k) * p) * H[k];
        p *= x;
    }
    return acc;
}

MetricJet MetricJet::conformal_rescale(double lambda) const {
    if (!(lambda > 0.0)) throw ValidationError("conformal factor must be positive");
    // x' = lambda x, h' = lambda^2 h; in the rescaled orthonormal frame the
    // coefficient of x'^k is lambda^{-k} H_k.
    MetricJet out = *this;
    double p = 1.0;
    for (Mat3& h : out.H) {
        h *= p;
        p /= lambda;
    }
    return out;
}

ExtrinsicJets extrinsic_jets(const MetricJet& m, int order) {
    const MatSeries H = m.series(order);
    const MatSeries Hinv = invert(H);
    ExtrinsicJets j{MatSeries(0, 0, Mat3::Zero()), ScalarSeries(0, 0, 0.0), MatSeries(0, 0, Mat3::Zero()),
                    MatSeries(0, 0, Mat3::Zero()), MatSeries(0, 0, Mat3::Zero())};
    j.shape = mul(Hinv, H.d_dx()).scaled(-0.5);
    j.meanCurv = trace(j.shape);
    j.normalCurv = j.shape.d_dx() - mul(j.shape, j.shape);
    const ScalarSeries root = sqrt_series(det_series(H));
    j.star = mul(root, Hinv);
    j.starInv = mul(invert(root), H);
    return j;
}

IntrinsicGeometry intrinsic_geometry(const FrameModel& frame, const Mat3& H) {
    require_spd(H, "metric");
    const Mat3 Hinv = H.inverse();
    IntrinsicGeometry g;
    auto lower = [&](int i, int j, int k) {
        // <[e_i, e_j], e_k>
        double s = 0.0;
        for (int m = 0; m < 3; ++m) s += frame.c(m, i, j) * H(m, k);
        return s;
    };
    // Koszul: 2 <nabla_i e_j, e_k> = <[e_i,e_j],e_k> - <[e_j,e_k],e_i> + <[e_k,e_i],e_j>
    double low[3][3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) low[i][j][k] = 0.5 * (lower(i, j, k) - lower(j, k, i) + lower(k, i, j));
    for (int m = 0; m < 3; ++m)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += Hinv(m, k) * low[i][j][k];
                g.gamma[m][i][j] = s;
            }

    // R(e_i,e_j)e_k = R^n_ijk e_n, Ric_jk = R^i_ijk
    const auto& G = g.gamma;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            double ric = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int m = 0; m < 3; ++m)
                    ric += G[m][j][k] * G[i][i][m] - G[m][i][k] * G[i][j][m] - frame.c(m, i, j) * G[i][m][k];
            g.ricci(j, k) = ric;
        }
    g.ricci = sym_part(g.ricci);
    g.scalar = (Hinv * g.ricci).trace();
    g.einstein = g.ricci - 0.5 * g.scalar * H;
    g.schouten = g.ricci - 0.25 * g.scalar * H;

    // Spin connection: in an orthonormal frame the Levi-Civita connection
    // 1-form omega^p_q(e_i) = Gamma^p_iq is skew in (p,q); its axial vector
    // W^p_i = 1/2 eps_pqr Gamma^r_iq is the su(2)-valued form.
    const FrameModel on = frame.orthonormalized(H);
    const IntrinsicGeometry unit = (H - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0 ? g : intrinsic_geometry(on, Mat3::Identity());
    for (int p = 0; p < 3; ++p)
        for (int i = 0; i < 3; ++i) {
            double s = 0.0;
            for (int q = 0; q < 3; ++q)
                for (int r = 0; r < 3; ++r) s += levi_civita(p, q, r) * unit.gamma[r][i][q];
            g.spinConn(p, i) = 0.5 * s;
        }
    return g;
}

WeylParts weyl_EB(const FrameModel& frame, const MetricJet& m) {
    if (!m.known_to(2)) throw ValidationError("Weyl parts need the metric jet to order 2");
    const ExtrinsicJets j = extrinsic_jets(m, 2);
    const IntrinsicGeometry ig = intrinsic_geometry(frame, Mat3::Identity());
    const Mat3 S0 = j.shape.coeff(0);
    const Mat3 RN0 = j.normalCurv.coeff(0);
    const double mc0 = j.meanCurv.coeff(0);
    WeylParts w;
    w.wE = 0.5 * trace_free(S0 * S0 - RN0 + ig.ricci - mc0 * S0);
    // star_0 is the identity at H_0 = I
    w.wB = symtf(covariant_ext_d(ig.spinConn, S0.transpose(), frame));
    return w;
}

std::vector<bool> check_pe(const FrameModel& frame, const MetricJet& m, int order, double tol) {
    if (order < 1 || order > 3) throw ValidationError("PE check order must be 1, 2 or 3");
    if (!m.known_to(order)) throw ValidationError("metric jet not known to order " + std::to_string(order));
    m.validate();
    std::vector<bool> out;
    out.push_back(m.coeff(1).cwiseAbs().maxCoeff() <= tol);
    if (order >= 2) {
        const Mat3 P = intrinsic_geometry(frame, Mat3::Identity()).schouten;
        out.push_back((m.coeff(2) + P).cwiseAbs().maxCoeff() <= tol);
    }
    if (order >= 3) out.push_back(std::abs(m.coeff(3).trace()) <= tol);
    return out;
}

}  // namespace nahm

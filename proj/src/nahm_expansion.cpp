#include "nahm/nahm_expansion.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace nahm {

namespace {

Mat3 star2_to_1(const Mat3& p, const Mat3& f) { return f * p.transpose(); }

// High-order coefficients grow geometrically with the frame's curvature
// scale, and the residual at x^{k-1} cancels terms of size k |alpha_k|. The
// recursion therefore accumulates that coefficient in long double and rounds
// alpha_k once.
using MatL = Eigen::Matrix<long double, 3, 3>;

MatL bracket_l(const MatL& g, const MatL& d) {
    MatL out = MatL::Zero();
    for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) {
            if (b == c) continue;
            const int a = 3 - b - c;
            const Eigen::Matrix<long double, 3, 1> gb = g.col(b), dc = d.col(c);
            out.col(a) += static_cast<long double>(levi_civita(b, c, a)) * gb.cross(dc);
        }
    return out;
}

/// Residual coefficient at x^m (log x)^l.
MatL residual_coeff(const MatSeries& alpha, const MatL& D, const std::vector<MatL>& P, int m, int l) {
    MatL r = static_cast<long double>(m + 1) * alpha.coeff(m + 1, l).cast<long double>() +
             static_cast<long double>(l + 1) * alpha.coeff(m + 1, l + 1).cast<long double>();
    const auto& terms = alpha.terms();
    for (int j = 0; j < static_cast<int>(P.size()) && m - j >= -2; ++j) {
        const int n = m - j;
        MatL f = alpha.coeff(n, l).cast<long double>() * D;
        for (const auto& [ka, va] : terms) {
            if (ka.second > l) continue;
            const auto it = terms.find({n - ka.first, l - ka.second});
            if (it != terms.end()) f += 0.5L * bracket_l(va.cast<long double>(), it->second.cast<long double>());
        }
        r += f * P[static_cast<size_t>(j)].transpose();
    }
    return r;
}

Mat3 solve_model_l(int k, const MatL& T) {
    const MatL sk = 0.5L * (T - T.transpose());
    const MatL sym = 0.5L * (T + T.transpose());
    const long double tr = T.trace();
    const MatL tf = sym - (tr / 3.0L) * MatL::Identity();
    const MatL a = sk / static_cast<long double>(k + 1) + tf / static_cast<long double>(k - 1) +
                   (tr / (3.0L * (k + 2))) * MatL::Identity();
    return a.cast<double>();
}

MatSeries residual_with(const MatSeries& alpha, const FrameModel& frame, const MatSeries& starInv) {
    const MatSeries f = curvature_series(alpha, frame);
    return alpha.d_dx() + mul(f, starInv, [](const Mat3& u, const Mat3& p) -> Mat3 { return star2_to_1(p, u); });
}

double max_at(const MatSeries& s, int k, int lmin) {
    double m = 0.0;
    for (const auto& [key, v] : s.terms())
        if (key.first == k && key.second >= lmin) m = std::max(m, coeff_norm(v));
    return m;
}

}  // namespace

void BoundaryData::validate() const {
    metric.validate();
    if (order < 2) throw ValidationError("truncation order must be at least 2");
    if (!sigma.allFinite()) throw ValidationError("sigma is not finite");
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-14 || std::abs(sigma.trace()) > 1e-14)
        throw ValidationError("sigma must be symmetric and trace-free");
    if (!metric.known_to(order + 1))
        throw ValidationError("metric jet must be known to order " + std::to_string(order + 1));
}

Mat3 ConnectionExpansion::coeff(int k, int l) const {
    if (k == -1) return l == 0 ? alphaMinus1 : Mat3::Zero();
    if (k == 0) return l == 0 ? alpha0 : Mat3::Zero();
    auto it = coeffs.find({k, l});
    return it == coeffs.end() ? Mat3::Zero() : it->second;
}

MatSeries ConnectionExpansion::series() const {
    MatSeries s(-1, order, Mat3::Zero());
    s.set(-1, 0, alphaMinus1);
    s.set(0, 0, alpha0);
    for (const auto& [key, v] : coeffs) s.set(key.first, key.second, v);
    return s;
}

ResidueClass classify_residue(const Mat3& R, double tol) {
    ResidueClass out;
    if (!R.allFinite()) return out;
    if (R.cwiseAbs().maxCoeff() <= tol) {
        out.tag = ResidueTag::Zero;
        out.rotation = Mat3::Zero();
        return out;
    }
    const Vec3 r1 = R.col(0), r2 = R.col(1), r3 = R.col(2);
    const double defect = std::max({(r1 - r2.cross(r3)).cwiseAbs().maxCoeff(), (r2 - r3.cross(r1)).cwiseAbs().maxCoeff(),
                                    (r3 - r1.cross(r2)).cwiseAbs().maxCoeff()});
    if (defect <= tol) {
        out.tag = ResidueTag::NahmPole;
        out.rotation = R;
    }
    return out;
}

Mat3 solve_torsion(const Mat3& T, const IntrinsicGeometry& intrinsic) {
    return intrinsic.spinConn + skew_part(T) - symtf(T) + (T.trace() / 6.0) * Mat3::Identity();
}

Mat3 alpha0(const FrameModel& frame, const MetricJet& m) {
    if (!m.known_to(1)) throw ValidationError("alpha0 needs the metric jet to order 1");
    const ExtrinsicJets j = extrinsic_jets(m, 1);
    const Mat3 omega = intrinsic_geometry(frame, Mat3::Identity()).spinConn;
    const Mat3 S0 = j.shape.coeff(0);
    if (coeff_is_zero(S0)) return omega;
    return omega - 2.0 * S0.transpose() + 0.5 * j.meanCurv.coeff(0) * Mat3::Identity();
}

Mat3 solve_model(int k, const Mat3& T) {
    if (k < 2) throw ValidationError("model operator is singular on trace-free symmetric forms at order 1");
    return skew_part(T) / (k + 1.0) + symtf(T) / (k - 1.0) + (T.trace() / (3.0 * (k + 2.0))) * Mat3::Identity();
}

MatSeries curvature_series(const MatSeries& alpha, const FrameModel& frame) {
    const Mat3 D = frame.d_theta();
    const MatSeries d = alpha.map([&D](const Mat3& a) -> Mat3 { return a * D; });
    const MatSeries sq = mul(alpha, alpha, [](const Mat3& u, const Mat3& v) { return wedge_bracket(u, v); });
    return d + sq.scaled(0.5);
}

MatSeries self_duality_residual(const MatSeries& alpha, const FrameModel& frame, const MetricJet& m, int order) {
    return residual_with(alpha, frame, extrinsic_jets(m, order).starInv);
}

ConnectionExpansion expand(const BoundaryData& data) {
    data.validate();
    const int N = data.order;
    const MatSeries P = extrinsic_jets(data.metric, N + 1).starInv;

    ConnectionExpansion e;
    e.order = N;
    e.alpha0 = alpha0(data.frame, data.metric);
    MatSeries alpha = e.series();

    auto check_zero = [&](const MatSeries& r, int k, int lmin, const char* what) {
        const double bad = max_at(r, k, lmin);
        if (bad > 1e-8 * (1.0 + alpha.max_norm()))
            throw NumericError(std::string(what) + " at x^" + std::to_string(k) + ": " + std::to_string(bad));
    };

    // Order 1: the model operator kills symtf, which is where sigma enters and
    // where the x log x term absorbs the obstruction.
    {
        const MatSeries r = residual_with(alpha, data.frame, P);
        check_zero(r, -2, 0, "soldering equation fails");
        check_zero(r, -1, 0, "torsion equation fails");
        check_zero(r, 0, 1, "unexpected log term");
        const Mat3 Q = -r.coeff(0, 0);
        const Mat3 a11 = symtf(Q);
        const Mat3 a10 = 0.5 * skew_part(Q) + data.sigma + (Q.trace() / 9.0) * Mat3::Identity();
        alpha.set(1, 1, a11);
        alpha.set(1, 0, a10);
    }

    const MatL D = data.frame.d_theta().cast<long double>();
    std::vector<MatL> PL;
    for (int j = 0; j <= N + 1; ++j) PL.push_back(P.coeff(j).cast<long double>());
    for (int k = 2; k <= N; ++k) {
        check_zero(residual_with(alpha, data.frame, P), k - 1, log_cap(k) + 1, "index set violated");
        for (int l = log_cap(k); l >= 0; --l) alpha.set(k, l, solve_model_l(k, -residual_coeff(alpha, D, PL, k - 1, l)));
    }

    for (const auto& [key, v] : alpha.terms()) {
        if (key.first < 1) continue;
        if (key.second > log_cap(key.first)) throw NumericError("index set violated in stored coefficients");
        e.coeffs[key] = v;
    }
    return e;
}

Obstruction obstruction(const FrameModel& frame, const MetricJet& m) {
    if (!m.known_to(2)) throw ValidationError("obstruction needs the metric jet to order 2");
    const ExtrinsicJets j = extrinsic_jets(m, 2);
    const Mat3 f = curvature(alpha0(frame, m), frame);
    Obstruction o;
    o.recursive = symtf(on_form_index(j.star.coeff(2), Mat3::Identity()) - f);
    const WeylParts w = weyl_EB(frame, m);
    o.weyl = 2.0 * (w.wB - w.wE);
    o.maxDiff = (o.recursive - o.weyl).cwiseAbs().maxCoeff();
    return o;
}

Mat3 spin_boundary_value(const FrameModel& frame, const Mat3& H) {
    const IntrinsicGeometry g = intrinsic_geometry(frame, H);
    return 0.5 * trace_free(H.inverse() * g.ricci);
}

bool is_smooth(const ConnectionExpansion& e, double tol) {
    for (const auto& [key, v] : e.coeffs)
        if (key.second >= 1 && coeff_norm(v) > tol) return false;
    return true;
}

ConnectionExpansion apply_residue(const ConnectionExpansion& e, const Mat3& R) {
    if (classify_residue(R).tag != ResidueTag::NahmPole) throw ValidationError("residue is not a rotation");
    ConnectionExpansion out = e;
    out.alphaMinus1 = R * e.alphaMinus1;
    out.alpha0 = R * e.alpha0;
    for (auto& [key, v] : out.coeffs) v = R * v;
    return out;
}

}  // namespace nahm

#include "nahm/dynamics_energy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace nahm {

namespace {

constexpr double kEightPiSq = 8.0 * std::numbers::pi * std::numbers::pi;

double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

Mat3 rk4_step(const Rhs& f, double x, const Mat3& y, double h) {
    const Mat3 k1 = f(x, y);
    const Mat3 k2 = f(x + 0.5 * h, y + (0.5 * h) * k1);
    const Mat3 k3 = f(x + 0.5 * h, y + (0.5 * h) * k2);
    const Mat3 k4 = f(x + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

size_t Trajectory::index_of(double x) const {
    auto it = std::lower_bound(grid.begin(), grid.end(), x * (1.0 - 1e-12));
    if (it == grid.end() || std::abs(*it - x) > 1e-12 * std::abs(x))
        throw ValidationError("x = " + fmt(x) + " is not a node of the trajectory grid");
    return static_cast<size_t>(it - grid.begin());
}

Integration integrate(const Rhs& rhs, const Mat3& seed, double x_from, double x_to, const StepControl& ctrl) {
    if (!(x_from > 0.0) || !(x_to > 0.0)) throw ValidationError("integration range must be positive");
    if (!seed.allFinite()) throw ValidationError("seed is not finite");
    if (!(ctrl.rtol > 0.0) && !(ctrl.atol > 0.0)) throw ValidationError("step control needs a positive tolerance");
    if (!(ctrl.max_rel_step > 0.0)) throw ValidationError("max_rel_step must be positive");

    const double dir = x_to >= x_from ? 1.0 : -1.0;
    std::vector<double> stops;
    for (double s : ctrl.stops)
        if ((s - x_from) * dir > 0.0 && (x_to - s) * dir > 0.0) stops.push_back(s);
    stops.push_back(x_to);
    std::sort(stops.begin(), stops.end(), [dir](double a, double b) { return a * dir < b * dir; });

    Integration out;
    double x = x_from;
    Mat3 y = seed;
    out.grid.push_back(x);
    out.values.push_back(y);
    out.derivs.push_back(rhs(x, y));

    double h = ctrl.initial_step > 0.0 ? ctrl.initial_step : 0.25 * ctrl.max_rel_step * x;
    for (double stop : stops) {
        while ((stop - x) * dir > 1e-15 * std::abs(stop)) {
            const double room = std::abs(stop - x);
            h = std::min({h, ctrl.max_rel_step * x, room});
            const bool lands = h >= room * (1.0 - 1e-12);
            const double step = dir * (lands ? room : h);
            const Mat3 y1 = rk4_step(rhs, x, y, step);
            const Mat3 yh = rk4_step(rhs, x, y, 0.5 * step);
            const Mat3 y2 = rk4_step(rhs, x + 0.5 * step, yh, 0.5 * step);
            const double err = max_abs(y2 - y1) / 15.0;
            const double bound = ctrl.rtol * std::max(max_abs(y), max_abs(y2)) + ctrl.atol;
            if (!y2.allFinite() || err > bound) {
                h = 0.5 * std::abs(step);
                if (h < ctrl.min_step * x)
                    throw NumericError("step size underflow at x = " + fmt(x));
                continue;
            }
            y = y2 + (y2 - y1) / 15.0;
            x = lands ? stop : x + step;
            out.grid.push_back(x);
            out.values.push_back(y);
            out.derivs.push_back(rhs(x, y));
            const double grow = err == 0.0 ? 2.0 : std::min(2.0, 0.9 * std::pow(bound / err, 0.2));
            h = std::abs(step) * std::max(grow, 0.2);
        }
    }
    if (dir < 0.0) {
        std::reverse(out.grid.begin(), out.grid.end());
        std::reverse(out.values.begin(), out.values.end());
        std::reverse(out.derivs.begin(), out.derivs.end());
    }
    return out;
}

Mat3 evolution_rhs(const FrameModel& frame, const MetricJet& metric, double x, const Mat3& a) {
    const Mat3 H = metric.evaluate(x);
    const Mat3 P = H / std::sqrt(H.determinant());
    const Mat3 f = curvature(a, frame);
    return -on_form_index(P, f);
}

Trajectory evolve(const FrameModel& frame, const MetricJet& metric, const Mat3& seed, double x_from, double x_to,
                  const StepControl& ctrl) {
    metric.validate();
    const Rhs rhs = [&](double x, const Mat3& a) { return evolution_rhs(frame, metric, x, a); };
    Integration r = integrate(rhs, seed, x_from, x_to, ctrl);
    Trajectory t{std::move(r.grid), std::move(r.values), std::move(r.derivs), frame, metric};
    return t;
}

GaugeFixed radial_gauge_fix(const MatSeries& tangential, const MatSeries& c) {
    for (const auto& [key, v] : c.terms()) {
        if (key.first <= 0 && !coeff_is_zero(v))
            throw ValidationError("dx component must vanish at x = 0 (term at x^" + std::to_string(key.first) + ")");
        if (max_abs(v + v.transpose()) > 1e-12 * std::max(1.0, max_abs(v)))
            throw ValidationError("dx component must be skew");
    }
    const int N = c.order();
    MatSeries g(0, N, Mat3::Zero());
    g.set(0, 0, Mat3::Identity());
    for (int k = 1; k <= N; ++k) {
        // k g_{k,l} + (l+1) g_{k,l+1} = -(c g)_{k,l}, solved from the top log down
        const MatSeries cg = mul(c, g);
        for (int l = cg.max_log(k); l >= 0; --l) {
            const Mat3 v = (-cg.coeff(k, l) - (l + 1.0) * g.coeff(k, l + 1)) / static_cast<double>(k);
            if (!coeff_is_zero(v)) g.set(k, l, v);
        }
    }
    GaugeFixed out{GaugeJet{g}, mul(transpose(g), tangential)};
    return out;
}

GaugedConnection apply_gauge(const GaugeJet& phi, const MatSeries& tangential) {
    const MatSeries pt = transpose(phi.g);
    return GaugedConnection{mul(pt, tangential), mul(pt, phi.g.x_d_dx())};
}

GaugeJet gauge_exp(const MatSeries& xi) {
    for (const auto& [key, v] : xi.terms()) {
        if (key.first <= 0 && !coeff_is_zero(v)) throw ValidationError("gauge generator must vanish at x = 0");
        if (max_abs(v + v.transpose()) > 1e-14 * std::max(1.0, max_abs(v)))
            throw ValidationError("gauge generator must be skew");
    }
    const int N = xi.order();
    MatSeries acc = MatSeries::constant(Mat3::Identity(), N, Mat3::Zero());
    MatSeries power = acc;
    for (int n = 1; n <= N; ++n) {
        power = mul(power, xi).scaled(1.0 / n).truncated(N);
        acc = acc + power;
    }
    return GaugeJet{acc};
}

Eigen::Matrix2cd su2_matrix(const Vec3& v) {
    using C = std::complex<double>;
    const C i(0.0, 1.0);
    Eigen::Matrix2cd m;
    // -i/2 (v1 sigma1 + v2 sigma2 + v3 sigma3)
    m << -0.5 * i * v(2), -0.5 * i * v(0) - 0.5 * v(1), -0.5 * i * v(0) + 0.5 * v(1), 0.5 * i * v(2);
    return m;
}

namespace {

// tr(A ^ F) per unit volume for a 1-form A and 2-form F, theta^j ^ beta_a = delta_ja vol
double tr_one_two(const Mat3& a, const Mat3& f) {
    std::complex<double> s = 0.0;
    for (int j = 0; j < 3; ++j) s += (su2_matrix(a.col(j)) * su2_matrix(f.col(j))).trace();
    return s.real();
}

double tr_cube(const Mat3& a) {
    std::complex<double> s = 0.0;
    Eigen::Matrix2cd m[3] = {su2_matrix(a.col(0)), su2_matrix(a.col(1)), su2_matrix(a.col(2))};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                const int e = levi_civita(i, j, k);
                if (e != 0) s += static_cast<double>(e) * (m[i] * m[j] * m[k]).trace();
            }
    return s.real();
}

}  // namespace

double boundary_cs_density(const Mat3& a, const Mat3& alpha0, const FrameModel& frame) {
    const Mat3 b = a - alpha0;
    const Mat3 f = curvature(alpha0, frame);
    const Mat3 db = covariant_ext_d(alpha0, b, frame);
    return (2.0 * tr_one_two(b, f) + tr_one_two(b, db) + (2.0 / 3.0) * tr_cube(b)) / kEightPiSq;
}

double chern_simons(const Mat3& a, const FrameModel& frame) {
    const Mat3 da = a * frame.d_theta();
    return frame.volume() * (tr_one_two(a, da) + (2.0 / 3.0) * tr_cube(a)) / kEightPiSq;
}

double energy_density(const FrameModel& frame, const Mat3& H, const Mat3& a, const Mat3& da) {
    // -tr(e_i e_j) = delta_ij / 2; Lambda^2 carries the metric H / det H in the beta basis.
    const double det = H.determinant();
    const Mat3 B = curvature(a, frame);
    const double e2 = 0.5 * (da * H.inverse() * da.transpose()).trace();
    const double b2 = 0.5 * (B * (H / det) * B.transpose()).trace();
    return (e2 + b2) * std::sqrt(det);
}

double simpson(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    if (n != y.size()) throw ValidationError("simpson: size mismatch");
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * (x[1] - x[0]) * (y[0] + y[1]);
    double total = 0.0;
    const size_t intervals = n - 1;
    const size_t paired = intervals - intervals % 2;
    for (size_t i = 0; i + 2 <= paired; i += 2) {
        const double h0 = x[i + 1] - x[i], h1 = x[i + 2] - x[i + 1];
        const double hs = h0 + h1;
        total += hs / 6.0 * ((2.0 - h1 / h0) * y[i] + hs * hs / (h0 * h1) * y[i + 1] + (2.0 - h0 / h1) * y[i + 2]);
    }
    if (intervals % 2 == 1) {
        // quadratic through the last three nodes, integrated over the last interval
        const double h0 = x[n - 2] - x[n - 3], h1 = x[n - 1] - x[n - 2];
        const double alpha = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        const double beta = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        const double eta = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        total += alpha * y[n - 1] + beta * y[n - 2] - eta * y[n - 3];
    }
    return total;
}

double collar_energy(const Trajectory& traj, double t, double t_max) {
    if (!(t > 0.0) || t > t_max) throw ValidationError("collar energy needs 0 < t <= t_max");
    const size_t i0 = traj.index_of(t), i1 = traj.index_of(t_max);
    std::vector<double> xs, ys;
    for (size_t i = i0; i <= i1; ++i) {
        xs.push_back(traj.grid[i]);
        ys.push_back(energy_density(traj.frame, traj.metric.evaluate(traj.grid[i]), traj.values[i], traj.derivs[i]));
    }
    return traj.frame.volume() * simpson(xs, ys) / kEightPiSq;
}

LaurentFit laurent_fit(const std::vector<std::pair<double, double>>& samples, const std::vector<int>& powers) {
    if (powers.empty()) throw ValidationError("laurent fit needs at least one power");
    if (samples.size() < 2 * powers.size()) throw ValidationError("laurent fit needs at least twice as many samples as powers");
    const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
    const Eigen::Index p = static_cast<Eigen::Index>(powers.size());
    Eigen::MatrixXd A(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = samples[static_cast<size_t>(i)].first;
        if (!(t > 0.0)) throw ValidationError("laurent fit needs positive sample points");
        y(i) = samples[static_cast<size_t>(i)].second;
        for (Eigen::Index j = 0; j < p; ++j) A(i, j) = std::pow(t, powers[static_cast<size_t>(j)]);
    }
    const Eigen::VectorXd scale = A.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < p; ++j) A.col(j) /= scale(j);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-13);
    if (qr.rank() < p) throw NumericError("laurent fit design matrix is rank deficient");
    const Eigen::VectorXd c = qr.solve(y);
    LaurentFit out;
    for (Eigen::Index j = 0; j < p; ++j) out.coeffs[powers[static_cast<size_t>(j)]] = c(j) / scale(j);
    out.residual = (A * c - y).cwiseAbs().maxCoeff();
    return out;
}

Integration evolve_deviation(const FrameModel& frame, const MetricJet& metric, const ConnectionExpansion& base,
                             int residual_order, const Mat3& seed, double x_from, double x_to,
                             const StepControl& ctrl) {
    if (residual_order < base.order) throw ValidationError("residual order below the expansion order");
    if (!metric.known_to(residual_order + 2)) throw ValidationError("metric jet too short for the residual order");
    // the truncated expansion is a finite sum, exact to any order
    MatSeries a(-1, residual_order + 1, Mat3::Zero());
    const MatSeries truncated = base.series();
    for (const auto& [key, v] : truncated.terms()) a.set(key.first, key.second, v);
    const MatSeries r = self_duality_residual(a, frame, metric, residual_order + 2);
    MatSeries forcing(base.order, r.order(), Mat3::Zero());
    for (const auto& [key, v] : r.terms())
        if (key.first >= base.order) forcing.set(key.first, key.second, v);
    const Mat3 D = frame.d_theta();
    const Rhs rhs = [&](double x, const Mat3& d) -> Mat3 {
        const Mat3 H = metric.evaluate(x);
        const Mat3 P = H / std::sqrt(H.determinant());
        const Mat3 f = d * D + wedge_bracket(a.evaluate(x), d) + 0.5 * wedge_bracket(d, d);
        return -on_form_index(P, f) - forcing.evaluate(x);
    };
    return integrate(rhs, seed, x_from, x_to, ctrl);
}

EnergyReport energy_report(const BoundaryData& data, const EnergyOptions& opt) {
    if (!(opt.t_min > 0.0) || !(opt.t_max > opt.t_min)) throw ValidationError("energy needs 0 < t_min < t_max");
    if (opt.samples < 2) throw ValidationError("energy needs at least two samples");
    const ConnectionExpansion e = expand(data);
    EnergyReport rep;
    for (int i = 0; i < opt.samples; ++i)
        rep.t.push_back(opt.t_min * std::pow(opt.t_max / opt.t_min, static_cast<double>(i) / (opt.samples - 1)));
    rep.t.back() = opt.t_max;
    StepControl ctrl = opt.ctrl;
    ctrl.stops.insert(ctrl.stops.end(), rep.t.begin(), rep.t.end());
    const Trajectory traj = evolve(data.frame, data.metric, e.evaluate(opt.t_min), opt.t_min, opt.t_max, ctrl);

    const double vol = data.frame.volume();
    std::vector<std::pair<double, double>> samples;
    for (double t : rep.t) {
        const double b = vol * boundary_cs_density(traj.values[traj.index_of(t)], e.alpha0, data.frame);
        rep.boundary.push_back(b);
        samples.emplace_back(t, b);
    }
    const LaurentFit fit = laurent_fit(samples, opt.powers);
    for (int p = -3; p <= 1; ++p) {
        auto it = fit.coeffs.find(p);
        rep.laurent[p] = it == fit.coeffs.end() ? 0.0 : it->second;
    }
    rep.fitResidual = fit.residual;
    rep.csValue = chern_simons(e.alpha0, data.frame);
    // Stokes: E(t, t_max) = B(t_max) - B(t), sign fixed by the flat model
    for (size_t i = 0; i < rep.t.size(); ++i) {
        const double en = collar_energy(traj, rep.t[i], opt.t_max);
        rep.energy.push_back(en);
        const double diff = en - (rep.boundary.back() - rep.boundary[i]);
        const double scale = std::max(std::abs(en), 1e-300);
        if (i + 1 < rep.t.size()) rep.stokesResidual = std::max(rep.stokesResidual, std::abs(diff) / scale);
    }
    return rep;
}

}  // namespace nahm

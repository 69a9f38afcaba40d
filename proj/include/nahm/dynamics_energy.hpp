#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "nahm/collar_geometry.hpp"
#include "nahm/frame_algebra.hpp"
#include "nahm/log_series.hpp"
#include "nahm/nahm_expansion.hpp"

namespace nahm {

struct StepControl {
    double rtol = 1e-12;        // local error per step, relative to |y|
    double atol = 0.0;          // absolute floor added to the relative bound
    double max_rel_step = 0.01; // step <= max_rel_step * x
    double min_step = 1e-15;    // relative to x
    double initial_step = 0.0;  // 0 picks max_rel_step * x / 4
    std::vector<double> stops;  // grid points the integrator must land on
};

struct Trajectory {
    std::vector<double> grid;  // strictly increasing
    std::vector<Mat3> values;
    std::vector<Mat3> derivs;
    FrameModel frame;
    MetricJet metric;

    size_t index_of(double x) const;  // exact grid node, ValidationError otherwise
};

using Rhs = std::function<Mat3(double, const Mat3&)>;

/// RK4 with Richardson step halving from x_from to x_to. Output is sorted
/// by x regardless of direction.
struct Integration {
    std::vector<double> grid;
    std::vector<Mat3> values;
    std::vector<Mat3> derivs;
};
Integration integrate(const Rhs& rhs, const Mat3& seed, double x_from, double x_to, const StepControl& ctrl);

/// -star(x) (d a + 1/2 [a ^ a]) for the metric h(x).
Mat3 evolution_rhs(const FrameModel& frame, const MetricJet& metric, double x, const Mat3& a);

Trajectory evolve(const FrameModel& frame, const MetricJet& metric, const Mat3& seed, double x_from, double x_to,
                  const StepControl& ctrl = {});

/// Radial dependence of an SO(3) gauge transformation, g_0 = I.
struct GaugeJet {
    MatSeries g;
};

struct GaugeFixed {
    GaugeJet gauge;
    MatSeries tangential;
};

/// Solves x g' = -c g with g_0 = I and returns g with g^T a, the tangential
/// part in radial gauge. c is the dx/x component as a skew matrix.
GaugeFixed radial_gauge_fix(const MatSeries& tangential, const MatSeries& c);

struct GaugedConnection {
    MatSeries tangential;
    MatSeries c;
};
/// Gauge transform of a connection in radial gauge by phi(x).
GaugedConnection apply_gauge(const GaugeJet& phi, const MatSeries& tangential);

/// Exponential of a skew matrix series with no terms at k <= 0.
GaugeJet gauge_exp(const MatSeries& xi);

/// (1/8 pi^2) [tr(2 b ^ f) + tr(b ^ d b) + 2/3 tr(b^3)] per unit frame volume,
/// b = a - alpha0, f and d taken with alpha0.
double boundary_cs_density(const Mat3& a, const Mat3& alpha0, const FrameModel& frame);

/// Chern-Simons functional of the constant connection a relative to the frame.
double chern_simons(const Mat3& a, const FrameModel& frame);

/// |F|^2_g sqrt(det g) of the 4d field strength, up to the x^{-4} that cancels.
double energy_density(const FrameModel& frame, const Mat3& H, const Mat3& a, const Mat3& da);

/// (1/8 pi^2) integral of |F|^2 over t <= x <= t_max, Simpson on the grid.
double collar_energy(const Trajectory& traj, double t, double t_max);

/// Simpson's rule on a nonuniform grid.
double simpson(const std::vector<double>& x, const std::vector<double>& y);

struct LaurentFit {
    std::map<int, double> coeffs;
    double residual = 0.0;  // max abs misfit over the samples
};

LaurentFit laurent_fit(const std::vector<std::pair<double, double>>& samples, const std::vector<int>& powers);

/// Integrates d = a - base for a solution a near a completed expansion
/// `base`, so differences far below double precision of a itself stay
/// resolvable. The residual of `base` is taken as a series through
/// `residual_order`; its terms below base.order() vanish by construction and
/// are dropped exactly.
Integration evolve_deviation(const FrameModel& frame, const MetricJet& metric, const ConnectionExpansion& base,
                             int residual_order, const Mat3& seed, double x_from, double x_to,
                             const StepControl& ctrl = {});

struct EnergyOptions {
    double t_min = 0.02;
    double t_max = 0.5;
    int samples = 30;
    std::vector<int> powers{-3, -2, -1, 0, 1, 2, 3, 4, 5};
    StepControl ctrl;
};

struct EnergyReport {
    std::map<int, double> laurent;  // powers -3..1 of vol * boundary density
    double fitResidual = 0.0;
    double csValue = 0.0;           // CS of alpha0 relative to the frame
    double stokesResidual = 0.0;    // max relative |E - (B(t_max) - B(t))|
    std::vector<double> t;
    std::vector<double> energy;     // collar energy E(t, t_max)
    std::vector<double> boundary;   // vol * boundary density at t
};

/// Seeds the trajectory from the expansion at t_min, integrates to t_max and
/// fits the boundary integral.
EnergyReport energy_report(const BoundaryData& data, const EnergyOptions& opt = {});

/// Trace of products in the 2x2 anti-hermitian picture, e_i -> -i sigma_i / 2.
Eigen::Matrix2cd su2_matrix(const Vec3& v);

}  // namespace nahm

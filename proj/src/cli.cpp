#include "nahm/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nahm/config.hpp"
#include "nahm/report.hpp"

namespace nahm {

namespace {

struct Flags {
    std::optional<std::string> preset, config, sigma, h2, json, connection;
    std::optional<int> order, samples;
    std::optional<double> x_from, x_to, t_min, t_max, rtol, max_rel_step;
};

void add_geometry(CLI::App* sub, Flags& f) {
    sub->add_option("--preset", f.preset, "t3-flat | s3-hyperbolic | t3-h2 | berger:<lambda>");
    sub->add_option("--config", f.config, "config file with [geometry]/[numeric]/[output] sections");
    sub->add_option("--sigma", f.sigma, "free datum: zero or 9 row-major numbers (3 = diagonal)");
    sub->add_option("--h2", f.h2, "x^2 metric coefficient: 3 (diagonal) or 9 numbers");
    sub->add_option("--json", f.json, "write a JSON report to this path");
}

RunConfig resolve(const Flags& f, bool order_is_expansion) {
    RunConfig cfg;
    if (f.config) cfg = load_config(*f.config);
    if (f.preset) cfg.preset = *f.preset;
    if (f.sigma) cfg.sigma = parse_sigma(*f.sigma);
    if (f.h2) cfg.h[2] = parse_matrix(*f.h2, "--h2");
    if (f.json) cfg.json_path = *f.json;
    if (f.order && order_is_expansion) cfg.order = *f.order;
    if (f.samples) cfg.samples = *f.samples;
    if (f.x_from) cfg.x_from = *f.x_from;
    if (f.x_to) cfg.x_to = *f.x_to;
    if (f.t_min) cfg.t_min = *f.t_min;
    if (f.t_max) cfg.t_max = *f.t_max;
    if (f.rtol) cfg.rtol = *f.rtol;
    if (f.max_rel_step) cfg.max_rel_step = *f.max_rel_step;
    if (cfg.preset.empty() && !cfg.structure && cfg.h.empty())
        throw ValidationError("no geometry given: use --preset or a config file");
    return cfg;
}

void write_json(const RunConfig& cfg, const Json& j) {
    if (cfg.json_path.empty()) return;
    std::ofstream os(cfg.json_path, std::ios::binary);
    if (!os) throw ValidationError("cannot write " + cfg.json_path);
    os << dump_report(j);
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

Json geometry_json(const Geometry& g) {
    Json h = Json::array();
    for (const Mat3& m : g.metric.H) h.push_back(matrix_json(m));
    return Json{{"name", g.name}, {"volume", g.frame.volume()}, {"metric", h}, {"exactMetric", g.metric.exact}};
}

int cmd_expand(const RunConfig& cfg, std::ostream& out) {
    const Geometry g = cfg.geometry();
    const ConnectionExpansion e = expand(BoundaryData{g.frame, g.metric, cfg.sigma, cfg.order});
    const MatSeries r = self_duality_residual(e.series(), g.frame, g.metric, cfg.order + 1).truncated(cfg.order - 1);
    out << "geometry " << g.name << ", order " << e.order << "\n";
    out << "alpha0\n" << format_matrix(e.alpha0);
    for (const auto& [key, v] : e.coeffs) out << "alpha[" << key.first << "][" << key.second << "]\n" << format_matrix(v);
    out << "smooth " << (is_smooth(e) ? "yes" : "no") << "\n";
    out << "self-duality residual through x^" << cfg.order - 1 << ": " << num(r.max_norm()) << "\n";
    Json j = report_header("expand");
    j["geometry"] = geometry_json(g);
    j["sigma"] = matrix_json(cfg.sigma);
    j["expansion"] = expansion_json(e);
    j["residual"] = r.max_norm();
    write_json(cfg, j);
    return 0;
}

int cmd_obstruction(const RunConfig& cfg, std::ostream& out) {
    const Geometry g = cfg.geometry();
    const Obstruction o = obstruction(g.frame, g.metric);
    out << "geometry " << g.name << "\n";
    out << "recursive\n" << format_matrix(o.recursive) << "weyl\n" << format_matrix(o.weyl);
    out << "maxDiff " << num(o.maxDiff) << "\n";
    Json j = report_header("obstruction");
    j["geometry"] = geometry_json(g);
    j["obstruction"] = obstruction_json(o);
    write_json(cfg, j);
    return 0;
}

int cmd_check_pe(const RunConfig& cfg, int order, std::ostream& out) {
    const Geometry g = cfg.geometry();
    const std::vector<bool> v = check_pe(g.frame, g.metric, order);
    static const char* names[] = {"h1 = 0", "h2 = -P(h0)", "tr h3 = 0"};
    out << "geometry " << g.name << "\n";
    for (size_t i = 0; i < v.size(); ++i) out << "  " << names[i] << ": " << (v[i] ? "true" : "false") << "\n";
    Json j = report_header("check-pe");
    j["geometry"] = geometry_json(g);
    j["pe"] = v;
    write_json(cfg, j);
    return 0;
}

int cmd_evolve(const RunConfig& cfg, std::ostream& out) {
    const Geometry g = cfg.geometry();
    const ConnectionExpansion e = expand(BoundaryData{g.frame, g.metric, cfg.sigma, cfg.order});
    StepControl ctrl = cfg.step_control();
    std::vector<double> xs;
    for (int i = 0; i <= 10; ++i) xs.push_back(cfg.x_from * std::pow(cfg.x_to / cfg.x_from, i / 10.0));
    xs.back() = cfg.x_to;
    ctrl.stops = xs;
    const Trajectory t = evolve(g.frame, g.metric, e.evaluate(cfg.x_from), cfg.x_from, cfg.x_to, ctrl);
    Json rows = Json::array();
    double worst = 0.0;
    out << "geometry " << g.name << ", " << t.grid.size() << " steps\n";
    out << "           x     |a - expansion|\n";
    for (size_t i = 0; i < t.grid.size(); ++i) worst = std::max(worst, (t.values[i] - e.evaluate(t.grid[i])).cwiseAbs().maxCoeff());
    for (double x : xs) {
        const size_t i = t.index_of(x);
        const double dev = (t.values[i] - e.evaluate(x)).cwiseAbs().maxCoeff();
        char buf[96];
        std::snprintf(buf, sizeof buf, "  %10.6f  %18.6e\n", x, dev);
        out << buf;
        rows.push_back(Json{{"x", x}, {"a", matrix_json(t.values[i])}, {"deviation", dev}});
    }
    out << "max deviation from the order-" << cfg.order << " expansion: " << num(worst) << "\n";
    Json j = report_header("evolve");
    j["geometry"] = geometry_json(g);
    j["trajectory"] = rows;
    j["steps"] = t.grid.size();
    j["maxDeviation"] = worst;
    write_json(cfg, j);
    return 0;
}

int cmd_energy(const RunConfig& cfg, std::ostream& out) {
    const Geometry g = cfg.geometry();
    const EnergyReport r = energy_report(BoundaryData{g.frame, g.metric, cfg.sigma, cfg.order}, cfg.energy_options());
    out << "geometry " << g.name << "\n";
    out << "boundary integral Laurent coefficients\n";
    for (const auto& [p, c] : r.laurent) out << "  t^" << p << ": " << num(c) << "\n";
    out << "fit residual " << num(r.fitResidual) << "\n";
    out << "CS(alpha0) " << num(r.csValue) << "\n";
    out << "Stokes residual " << num(r.stokesResidual) << "\n";
    Json j = report_header("energy");
    j["geometry"] = geometry_json(g);
    j["energy"] = energy_json(r);
    write_json(cfg, j);
    return 0;
}

int cmd_cs(const RunConfig& cfg, const std::string& which, std::ostream& out) {
    const Geometry g = cfg.geometry();
    Mat3 a;
    if (which == "theta") a = Mat3::Identity();
    else if (which == "zero") a = Mat3::Zero();
    else if (which == "alpha0") a = alpha0(g.frame, g.metric);
    else a = parse_matrix(which, "--connection");
    const double v = chern_simons(a, g.frame);
    out << "geometry " << g.name << "\nCS " << num(v) << "\n";
    Json j = report_header("cs");
    j["geometry"] = geometry_json(g);
    j["connection"] = matrix_json(a);
    j["cs"] = v;
    write_json(cfg, j);
    return 0;
}

int cmd_presets(std::ostream& out) {
    for (const std::string& n : preset_names()) out << "  " << n << "  " << preset_description(n) << "\n";
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nahm pole instanton expansions on hyperbolic collars"};
    app.require_subcommand(1);
    Flags f;
    int pe_order = 3;
    std::string connection = "alpha0";

    CLI::App* expand_cmd = app.add_subcommand("expand", "log-series expansion of the geodesic normal family");
    add_geometry(expand_cmd, f);
    expand_cmd->add_option("--order", f.order, "truncation order N >= 2");

    CLI::App* obs_cmd = app.add_subcommand("obstruction", "obstruction tensor from the recursion and from Weyl parts");
    add_geometry(obs_cmd, f);

    CLI::App* pe_cmd = app.add_subcommand("check-pe", "Poincare-Einstein conditions on the metric jets");
    add_geometry(pe_cmd, f);
    pe_cmd->add_option("--order", pe_order, "1, 2 or 3");

    CLI::App* evolve_cmd = app.add_subcommand("evolve", "integrate the evolution equation from an expansion seed");
    add_geometry(evolve_cmd, f);
    evolve_cmd->add_option("--order", f.order, "expansion order for the seed");
    evolve_cmd->add_option("--x-from", f.x_from);
    evolve_cmd->add_option("--x-to", f.x_to);
    evolve_cmd->add_option("--rtol", f.rtol);
    evolve_cmd->add_option("--max-rel-step", f.max_rel_step);

    CLI::App* energy_cmd = app.add_subcommand("energy", "collar energy and boundary-integral Laurent fit");
    add_geometry(energy_cmd, f);
    energy_cmd->add_option("--order", f.order, "expansion order for the seed");
    energy_cmd->add_option("--t-min", f.t_min);
    energy_cmd->add_option("--t-max", f.t_max);
    energy_cmd->add_option("--samples", f.samples);
    energy_cmd->add_option("--rtol", f.rtol);
    energy_cmd->add_option("--max-rel-step", f.max_rel_step);

    CLI::App* cs_cmd = app.add_subcommand("cs", "Chern-Simons functional relative to the frame");
    add_geometry(cs_cmd, f);
    cs_cmd->add_option("--connection", connection, "theta | zero | alpha0 | 9 numbers");

    CLI::App* presets_cmd = app.add_subcommand("presets", "list preset geometries");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (presets_cmd->parsed()) return cmd_presets(out);
        if (pe_cmd->parsed()) return cmd_check_pe(resolve(f, false), pe_order, out);
        const RunConfig cfg = resolve(f, true);
        if (expand_cmd->parsed()) return cmd_expand(cfg, out);
        if (obs_cmd->parsed()) return cmd_obstruction(cfg, out);
        if (evolve_cmd->parsed()) return cmd_evolve(cfg, out);
        if (energy_cmd->parsed()) return cmd_energy(cfg, out);
        if (cs_cmd->parsed()) return cmd_cs(cfg, connection, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace nahm

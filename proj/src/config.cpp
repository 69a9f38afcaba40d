#include "nahm/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace nahm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
        throw ValidationError(what + ": expected a finite number, got '" + t + "'");
    return v;
}

int parse_int(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || v < -1000000 || v > 1000000)
        throw ValidationError(what + ": expected an integer, got '" + t + "'");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    if (t == "true") return true;
    if (t == "false") return false;
    throw ValidationError(what + ": expected true or false, got '" + t + "'");
}

}  // namespace

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item, what));
    if (!text.empty() && text.back() == ',') throw ValidationError(what + ": trailing comma");
    return out;
}

Mat3 parse_matrix(const std::string& text, const std::string& what) {
    const std::vector<double> v = parse_numbers(text, what);
    Mat3 m = Mat3::Zero();
    if (v.size() == 3) {
        for (int i = 0; i < 3; ++i) m(i, i) = v[static_cast<size_t>(i)];
    } else if (v.size() == 9) {
        for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = v[static_cast<size_t>(i)];
    } else {
        throw ValidationError(what + ": expected 3 (diagonal) or 9 (row-major) numbers, got " + std::to_string(v.size()));
    }
    return m;
}

Mat3 parse_sigma(const std::string& text) {
    if (trim(text) == "zero") return Mat3::Zero();
    const Mat3 s = parse_matrix(text, "sigma");
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-14 || std::abs(s.trace()) > 1e-14)
        throw ValidationError("sigma: must be symmetric and trace-free");
    return s;
}

RunConfig parse_config(std::istream& in, const std::string& source, RunConfig cfg) {
    static const std::set<std::string> sections{"geometry", "numeric", "output"};
    std::string section;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError(where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!sections.count(section)) throw ValidationError(where + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ValidationError(where + ": key '" + key + "' outside a section");
        const std::string full = section + "." + key;
        if (!seen.insert(full).second) throw ValidationError(where + ": duplicate key " + full);
        const std::string what = where + ": " + full;

        if (section == "geometry") {
            if (key == "preset") {
                cfg.preset = value;
            } else if (key == "structure") {
                const std::vector<double> v = parse_numbers(value, what);
                if (v.size() != 27) throw ValidationError(what + ": expected 27 numbers c[k][i][j]");
                FrameModel::Constants c{};
                for (int n = 0; n < 27; ++n) c[n / 9][(n / 3) % 3][n % 3] = v[static_cast<size_t>(n)];
                cfg.structure = c;
            } else if (key == "volume") {
                cfg.volume = parse_double(value, what);
            } else if (key.size() >= 2 && key[0] == 'h' && key.find_first_not_of("0123456789", 1) == std::string::npos) {
                const int k = parse_int(key.substr(1), what);
                if (k < 1 || k > 32) throw ValidationError(what + ": jet index must be in 1..32");
                cfg.h[k] = parse_matrix(value, what);
            } else if (key == "exact") {
                cfg.exact = parse_bool(value, what);
            } else if (key == "sigma") {
                try {
                    cfg.sigma = parse_sigma(value);
                } catch (const ValidationError& e) {
                    throw ValidationError(where + ": " + e.what());
                }
            } else if (key == "order") {
                cfg.order = parse_int(value, what);
            } else {
                throw ValidationError(where + ": unknown key " + full);
            }
        } else if (section == "numeric") {
            if (key == "rtol") cfg.rtol = parse_double(value, what);
            else if (key == "max_rel_step") cfg.max_rel_step = parse_double(value, what);
            else if (key == "x_from") cfg.x_from = parse_double(value, what);
            else if (key == "x_to") cfg.x_to = parse_double(value, what);
            else if (key == "t_min") cfg.t_min = parse_double(value, what);
            else if (key == "t_max") cfg.t_max = parse_double(value, what);
            else if (key == "samples") cfg.samples = parse_int(value, what);
            else if (key == "powers") {
                cfg.powers.clear();
                for (double p : parse_numbers(value, what)) {
                    if (p != std::floor(p)) throw ValidationError(what + ": powers must be integers");
                    cfg.powers.push_back(static_cast<int>(p));
                }
            } else {
                throw ValidationError(where + ": unknown key " + full);
            }
        } else {
            if (key == "json") cfg.json_path = value;
            else throw ValidationError(where + ": unknown key " + full);
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path);
    return parse_config(in, path, std::move(base));
}

Geometry RunConfig::geometry() const {
    Geometry g;
    if (!preset.empty()) {
        auto h2 = h.find(2);
        g = make_preset(preset, (preset == "t3-h2" && h2 != h.end()) ? &h2->second : nullptr);
        if (structure) throw ValidationError("geometry: give either a preset or structure constants, not both");
    } else {
        g.name = "inline";
        g.frame = structure ? FrameModel(*structure, volume) : FrameModel::flat_torus(volume);
        g.metric = MetricJet::product();
    }
    for (const auto& [k, m] : h) {
        if (static_cast<int>(g.metric.H.size()) <= k) g.metric.H.resize(static_cast<size_t>(k) + 1, Mat3::Zero());
        g.metric.H[static_cast<size_t>(k)] = m;
    }
    if (preset.empty()) g.metric.exact = exact;
    g.metric.validate();
    return g;
}

StepControl RunConfig::step_control() const {
    StepControl c;
    c.rtol = rtol;
    c.max_rel_step = max_rel_step;
    return c;
}

EnergyOptions RunConfig::energy_options() const {
    EnergyOptions o;
    o.t_min = t_min;
    o.t_max = t_max;
    o.samples = samples;
    o.powers = powers;
    o.ctrl = step_control();
    return o;
}

}  // namespace nahm

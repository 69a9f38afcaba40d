#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nahm/dynamics_energy.hpp"
#include "nahm/presets.hpp"

namespace nahm {

/// Parsed run settings. Config files look like
///
///   [geometry]
///   preset = t3-h2
///   h2 = 1, -1, 0
///   sigma = zero
///   order = 6
///   [numeric]
///   rtol = 1e-12
///   [output]
///   json = report.json
///
/// Matrices are row-major 9-tuples; a 3-tuple means a diagonal matrix.
struct RunConfig {
    std::string preset;  // empty: inline geometry
    std::optional<FrameModel::Constants> structure;  // c[k][i][j], 27 values
    double volume = 1.0;
    std::map<int, Mat3> h;  // overrides of H_k, k >= 1
    bool exact = true;
    Mat3 sigma = Mat3::Zero();
    int order = 6;

    double rtol = 1e-12;
    double max_rel_step = 0.01;
    double x_from = 0.05;
    double x_to = 0.2;
    double t_min = 0.02;
    double t_max = 0.5;
    int samples = 30;
    std::vector<int> powers{-3, -2, -1, 0, 1, 2, 3, 4, 5};

    std::string json_path;

    Geometry geometry() const;
    StepControl step_control() const;
    EnergyOptions energy_options() const;
};

/// Strict parser: unknown sections or keys, duplicates and malformed values
/// are ValidationErrors naming the source and line.
RunConfig parse_config(std::istream& in, const std::string& source, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Comma separated numbers; 3 values give a diagonal matrix, 9 a row-major one.
Mat3 parse_matrix(const std::string& text, const std::string& what);
/// "zero" or a matrix.
Mat3 parse_sigma(const std::string& text);
std::vector<double> parse_numbers(const std::string& text, const std::string& what);

}  // namespace nahm

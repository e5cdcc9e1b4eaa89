#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specgraph/curves.hpp"
#include "specgraph/maslov.hpp"
#include "specgraph/spectral.hpp"

namespace specgraph {

// A fully specified computation scenario, loadable from a sectioned key-value
// config file.  Shipped presets cover the three star waves (b = 5, 3, 1) and
// the three interval cases of the boundary-rotation study.
struct Scenario {
    enum class Kind { StarWave, IntervalRotating, IntervalWave };
    Kind kind = Kind::StarWave;
    std::string name = "custom";

    // star wave
    double beta = -1.0;
    double p = 3.0;
    double alpha = 0.0;
    double center_value = 1.0;
    std::vector<double> center_slopes;

    // interval scenarios
    double length = M_PI;           // rotating: interval length; wave: T/2 target
    bool rotate_left = false;
    bool rotate_right = true;
    std::optional<double> amplitude;  // wave arch; solved from length when absent

    // sweep window
    double lambda_min = 0.0;
    double lambda_max = 0.0;  // 0 = auto (lambda_inf bound)
    double t_min = 0.02;
    double t_max = 1.0;
    int n_lambda = 160;
    int n_t = 120;

    // pipeline knobs
    IndexOptions index;
    int threads = 0;
    unsigned seed = 20240801;

    void validate() const;  // throws ConfigError
};

// Parse the flat sectioned key-value format ("[section]" headers, "key = value"
// lines, '#' comments).
Scenario scenario_from_string(const std::string& text);
Scenario scenario_from_file(const std::string& path);

// Compiled-in preset configs: fig1_b5, fig1_b3, fig1_b1, fig2_item1,
// fig2_item2, fig2_item3.
const std::map<std::string, std::string>& preset_texts();
Scenario preset_scenario(const std::string& name);

// Materialize the scenario: integrate the wave (where applicable) and attach
// the boundary scheme.
Problem build_problem(const Scenario& scenario);

}  // namespace specgraph

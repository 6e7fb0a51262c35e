#pragma once

// Experiment configuration files.
//
//   # comment
//   key = value
//   list_key = 1.0, 2.0        (commas and/or spaces)
//
// Unknown or repeated keys are errors; every error names the source, line
// and field. See README.md for the key list.

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "ipid/detection_dp.hpp"
#include "ipid/model.hpp"
#include "ipid/monte_carlo.hpp"

namespace ipid {

struct ExperimentConfig {
    std::string name;
    std::string label;  // row label in reproduction tables

    std::size_t period = 0;
    std::vector<double> pre_mean, pre_var;    // variances default to 1
    std::vector<double> post_mean, post_var;
    double rho = 0.01;
    std::vector<double> lambda;
    std::vector<double> delay;

    std::size_t grid = 100;
    double tol = 1e-8;
    std::size_t max_cycles = 100000;

    std::size_t paths = 10000;
    std::int64_t horizon = 0;  // 0: 50 / rho
    std::uint64_t seed = 1;
    CostAlignment alignment = CostAlignment::Lagged;
    std::string output_dir = "out";

    std::optional<std::vector<double>> thresholds;  // a policy: 1 or T values
    std::optional<std::vector<double>> sweep_grid;  // single thresholds to sweep
    std::vector<double> alphas;

    // Reference values carried into reproduction output for diffing.
    std::optional<double> published_single;
    std::optional<double> published_optimal;

    IpidScenario scenario() const;
    DetectionCostSpec costs() const;
    DetectionSolveOptions solve_options() const;
    SimulationOptions simulation_options() const;
};

ExperimentConfig parse_config(std::istream& in, const std::string& source);
ExperimentConfig load_config(const std::string& path);

}  // namespace ipid

#pragma once

// Runners shared by the CLI and the acceptance suite: one reproduction row
// (single-threshold sweep plus the DP policy) and the delay/false-alarm
// tradeoff.

#include <string>
#include <vector>

#include "ipid/config.hpp"
#include "ipid/detection_dp.hpp"
#include "ipid/monte_carlo.hpp"

namespace ipid {

enum class Target { Table1, Table2, Table3, Fig1, Fig2, Fig3 };

Target parse_target(const std::string& text);
const char* target_name(Target target);
// Bundled config file names (without directory) making up a target.
std::vector<std::string> target_configs(Target target);

struct RowResult {
    ExperimentConfig config;
    SweepResult sweep;                  // single-threshold policies
    DetectionSolution solution;         // optimal thresholds and J*(0)
    SimulationReport optimal;           // DP thresholds, config alignment
    SimulationReport optimal_aligned;   // DP thresholds, aligned costs

    double best_threshold() const { return sweep.best_point().threshold; }
    const SimulationReport& single() const { return sweep.best_point().report; }
};

// Sweeps single thresholds (config sweep_grid, else the default grid) and
// simulates the DP policy on the same seed.
RowResult run_row(const ExperimentConfig& config);

struct TradeoffRow {
    double alpha = 0.0;
    AddPfaReport sim;
    double analytic = 0.0;
};

struct TradeoffResult {
    double information = 0.0;    // I
    double tail_exponent = 0.0;  // d
    std::vector<TradeoffRow> rows;
    std::vector<BoundComparison> bound;
};

// Threshold A = 1 - alpha for every alpha in the config.
TradeoffResult run_tradeoff(const ExperimentConfig& config, double slack = 0.85);

}  // namespace ipid

#pragma once

// CSV artifacts. Every file starts with a header row; numbers are written
// with 10 significant digits so that reruns produce identical bytes.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ipid/detection_dp.hpp"
#include "ipid/experiments.hpp"
#include "ipid/monte_carlo.hpp"
#include "ipid/periodic_mdp.hpp"

namespace ipid::csv {

std::string num(double v);
std::string num(const std::optional<double>& v);  // empty when absent

// p, stage_l_cost..., stage_l_stop..., stage_l_continue...
void value_curves(std::ostream& out, const DetectionSolution& solution);
// cycle, l2, sup
void history(std::ostream& out, const DetectionSolution& solution);
// cycle, p, value (J_k on the grid, one row per point)
void iterates(std::ostream& out, const DetectionSolution& solution);
// stage, threshold, strict_threshold
void thresholds(std::ostream& out, const DetectionSolution& solution);
// A, cost, se
void sweep(std::ostream& out, const SweepResult& sweep);
// policy, kind, estimate, se, paths, seed, horizon, censored_fraction, alignment
void reports(std::ostream& out, const std::vector<std::string>& policies,
             const std::vector<SimulationReport>& reports, CostAlignment alignment);
// alpha, abs_log_alpha, ADD_sim, ADD_cond_sim, PFA_sim, ADD_analytic, then
// standard errors, the bound flag and the censored fraction
void tradeoff(std::ostream& out, const TradeoffResult& result);
// n, y, p_n, nu_marker
void trace(std::ostream& out, const std::vector<TracePoint>& trace);
// One row per table row, with the published values alongside.
void reproduction(std::ostream& out, Target target, const std::vector<RowResult>& rows);
// stage, state, value, action
void mdp_solution(std::ostream& out, const StageValues& values, const PeriodicPolicy& policy);

}  // namespace ipid::csv

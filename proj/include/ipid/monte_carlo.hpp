#pragma once

// Seedable simulation of threshold stopping rules on i.p.i.d. sample paths.
//
// A rule stops at the first n >= 1 with p_n > A_stage, p_0 = 0. Path i of a
// run always uses random stream i of the seed, so estimates are bit-identical
// for any worker count and several rules evaluated on one seed share paths.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ipid/detection_dp.hpp"
#include "ipid/model.hpp"

namespace ipid {

// Which stage's costs and threshold apply at time n >= 1.
//   Lagged:  stage (n - 1) mod T, the stage of the observation just received.
//   Aligned: stage n mod T, the stage whose Bellman operator decides at n in
//            the dynamic program (time 0 is stage 0).
enum class CostAlignment { Lagged, Aligned };

std::size_t cost_stage(std::int64_t n, std::size_t period, CostAlignment alignment);
const char* alignment_name(CostAlignment alignment);
CostAlignment parse_alignment(const std::string& text);

class StoppingPolicy {
public:
    static StoppingPolicy single(double threshold);
    static StoppingPolicy periodic(std::vector<double> thresholds);

    bool is_single() const { return single_; }
    const std::vector<double>& thresholds() const { return thresholds_; }
    // Threshold and its log odds for 0-based stage l.
    double threshold(std::size_t stage) const;
    double log_odds_threshold(std::size_t stage) const;

    void validate(std::size_t period) const;
    std::string describe() const;

private:
    StoppingPolicy() = default;

    bool single_ = true;
    std::vector<double> thresholds_;
    std::vector<double> log_odds_;
};

struct PolicyRun {
    std::optional<std::int64_t> stop_time;  // nullopt: no stop within the horizon
    std::optional<std::int64_t> change_point;
};

// Replays a stored path through the belief recursion.
PolicyRun run_policy(const SamplePath& path, const StoppingPolicy& policy, double rho,
                     const IpidScenario& scenario, CostAlignment alignment = CostAlignment::Lagged);

// p_1 .. p_H along a stored path.
std::vector<double> belief_trajectory(const SamplePath& path, double rho,
                                      const IpidScenario& scenario);

enum class EstimateKind { BayesCost, Add, ConditionalAdd, Pfa };
const char* estimate_name(EstimateKind kind);

struct SimulationReport {
    EstimateKind kind = EstimateKind::BayesCost;
    double estimate = 0.0;
    double standard_error = 0.0;  // sample sd / sqrt(paths)
    std::size_t paths = 0;        // paths entering the average
    std::uint64_t seed = 0;
    std::int64_t horizon = 0;
    double censored_fraction = 0.0;
};

struct SimulationOptions {
    std::size_t paths = 10000;
    std::int64_t horizon = 0;  // 0: 50 / rho
    std::uint64_t seed = 1;
    CostAlignment alignment = CostAlignment::Lagged;
};

std::int64_t resolve_horizon(const SimulationOptions& options, double rho);

// Per path: lambda at the stop time when tau < nu, otherwise the delay
// penalties summed over nu <= n < tau. Paths still running at the horizon
// are charged their delay through the horizon and counted as censored.
SimulationReport estimate_bayes_cost(const IpidScenario& scenario, const DetectionCostSpec& costs,
                                     const StoppingPolicy& policy,
                                     const SimulationOptions& options);

// Bayes cost of several rules on the same paths.
std::vector<SimulationReport> estimate_bayes_costs(const IpidScenario& scenario,
                                                   const DetectionCostSpec& costs,
                                                   const std::vector<StoppingPolicy>& policies,
                                                   const SimulationOptions& options);

struct SweepPoint {
    double threshold = 0.0;
    SimulationReport report;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::size_t best = 0;  // index of the smallest estimate, first on ties

    const SweepPoint& best_point() const { return points.at(best); }
};

// 0, steps of 0.001 to 0.02, 0.002 to 0.05, 0.005 to 0.1, 0.01 to 0.2, then
// 0.05 to 0.95 and 0.99.
std::vector<double> default_threshold_grid();

SweepResult sweep_single_threshold(const IpidScenario& scenario, const DetectionCostSpec& costs,
                                   const std::vector<double>& thresholds,
                                   const SimulationOptions& options);

struct AddPfaReport {
    SimulationReport add;              // E[(tau - nu)^+]
    SimulationReport conditional_add;  // E[tau - nu | tau >= nu]
    SimulationReport pfa;              // P(tau < nu)
};

AddPfaReport estimate_add_pfa(const IpidScenario& scenario, double rho,
                              const StoppingPolicy& policy, const SimulationOptions& options);

// |log alpha| / (I + d).
double analytic_delay(double alpha, double information, double tail_exponent);

struct BoundComparison {
    double alpha = 0.0;
    double simulated = 0.0;
    double standard_error = 0.0;
    double bound = 0.0;
    bool below_slack = false;  // simulated < slack * bound
};

// Tabulates simulated conditional delays against the asymptotic bound and
// flags points under slack * bound. Never throws on a flagged point.
std::vector<BoundComparison> lower_bound_check(const IpidScenario& scenario,
                                               const ChangePrior& prior,
                                               const std::vector<double>& alphas,
                                               const std::vector<SimulationReport>& conditional_add,
                                               double slack = 0.85);

struct TracePoint {
    std::int64_t n = 0;
    double y = 0.0;
    double p = 0.0;
    bool change = false;  // n == nu
};

// One path of the statistic, run until the rule stops (inclusive) or the
// horizon.
std::vector<TracePoint> trace_path(const IpidScenario& scenario, double rho,
                                   const StoppingPolicy& policy, std::int64_t horizon,
                                   std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace ipid

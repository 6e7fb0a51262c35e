#pragma once

// Value iteration for finite MDPs whose kernels and costs repeat with period T.
//
// Stage l of the cycle applies
//     Psi_l(V)(s) = min_a [ c_l(s, a) + alpha * sum_s' P_l(s' | s, a) V(s') ]
// and one cycle is Psi = Psi_0 Psi_1 ... Psi_{T-1} (Psi_{T-1} acts first).
// Iterating Psi from V = 0 converges monotonically to the optimal cost for
// nonnegative costs, also when alpha = 1.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ipid/common.hpp"

namespace ipid {

class PeriodicMdp {
public:
    PeriodicMdp(std::size_t states, std::size_t actions, std::size_t period, double discount);

    std::size_t states() const { return states_; }
    std::size_t actions() const { return actions_; }
    std::size_t period() const { return period_; }
    double discount() const { return discount_; }

    void set_transition(std::size_t stage, std::size_t state, std::size_t action,
                        std::span<const double> row);
    void set_cost(std::size_t stage, std::size_t state, std::size_t action, double cost);

    std::span<const double> transition(std::size_t stage, std::size_t state,
                                       std::size_t action) const;
    double cost(std::size_t stage, std::size_t state, std::size_t action) const;
    double max_cost() const;

    // Rows stochastic within 1e-12, costs finite and >= 0. Throws otherwise.
    void validate() const;

private:
    std::size_t index(std::size_t stage, std::size_t state, std::size_t action) const;

    std::size_t states_;
    std::size_t actions_;
    std::size_t period_;
    double discount_;
    std::vector<double> kernel_;  // [stage][state][action][next]
    std::vector<double> cost_;    // [stage][state][action]
};

using ActionMap = std::vector<std::size_t>;

struct PeriodicPolicy {
    std::vector<ActionMap> maps;  // one per stage

    static PeriodicPolicy stationary(ActionMap map, std::size_t period);
    const ActionMap& at_stage(std::size_t stage) const { return maps.at(stage); }
};

struct ValueIterationOptions {
    double tol = 1e-8;
    std::size_t max_cycles = 100000;
};

// 1e-8 for discount < 1; 1e-6 for undiscounted problems, which carry no
// contraction rate.
ValueIterationOptions default_iteration_options(double discount);

// Result of iterating a periodic Bellman cycle from the zero function.
struct StageValues {
    ValueVector value;                     // V_k at termination
    ValueVector previous;                  // V_{k-1}
    std::vector<ValueVector> stage_entry;  // [l] = Psi_l ... Psi_{T-1}(V_{k-1}); [0] == value
    std::vector<double> sup_history;       // ||V_k - V_{k-1}||_inf per cycle
    std::vector<double> l2_history;        // ||V_k - V_{k-1}||_2 per cycle
    std::size_t cycles = 0;
    bool converged = false;
    bool monotone = true;                  // V_{k-1} <= V_k held on every cycle
};

// Stage operator used by the cycle driver: maps the value at the entry of
// stage l + 1 to the value at the entry of stage l.
using StageOperator = std::function<ValueVector(const ValueVector& next, std::size_t stage)>;

// Applies stages T-1, ..., 0 to `value`. Element l of the result is the value
// at the entry of stage l.
std::vector<ValueVector> compose_stages(const ValueVector& value, std::size_t period,
                                        const StageOperator& op);

// Shared driver for every periodic Bellman problem in the library.
StageValues iterate_cycles(std::size_t states, std::size_t period, const StageOperator& op,
                           const ValueIterationOptions& options);

ValueVector apply_stage_operator(const ValueVector& value, const PeriodicMdp& mdp,
                                 std::size_t stage);
ValueVector apply_policy_operator(const ValueVector& value, const PeriodicMdp& mdp,
                                  std::size_t stage, const ActionMap& policy);

struct CycleResult {
    ValueVector value;                     // Psi(V)
    std::vector<ValueVector> stage_entry;  // [l] = Psi_l ... Psi_{T-1}(V)
};

CycleResult apply_cycle_operator(const ValueVector& value, const PeriodicMdp& mdp);

StageValues value_iterate(const PeriodicMdp& mdp, const ValueIterationOptions& options = {});

// mu_l(s) = argmin_a of Psi_l applied to Psi_{l+1} ... Psi_{T-1}(V), lowest
// index on ties.
PeriodicPolicy extract_periodic_policy(const StageValues& values, const PeriodicMdp& mdp);

// ||Psi(V) - V||_inf for the terminal V.
double fixed_point_residual(const StageValues& values, const PeriodicMdp& mdp);
double fixed_point_residual(const ValueVector& value, const PeriodicMdp& mdp);

// Optimal cost of the horizon-N problem starting at stage 0, by plain
// backward induction. N must be a multiple of the period.
ValueVector finite_horizon_oracle(const PeriodicMdp& mdp, std::size_t horizon);

// Expected discounted cost of a policy over `horizon` steps from stage 0.
ValueVector evaluate_policy(const PeriodicMdp& mdp, const PeriodicPolicy& policy,
                            std::size_t horizon);

struct PolicyCostEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t paths = 0;
};

// Monte-Carlo estimate of the discounted cost of `policy` from `start`.
// Path i uses random stream i of `seed`, so two policies evaluated with the
// same seed share their uniforms.
PolicyCostEstimate simulate_policy_cost(const PeriodicMdp& mdp, const PeriodicPolicy& policy,
                                        std::size_t start, std::size_t paths,
                                        std::size_t horizon, std::uint64_t seed);

}  // namespace ipid

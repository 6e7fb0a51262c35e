#include "ipid/experiments.hpp"

namespace ipid {

Target parse_target(const std::string& text) {
    for (Target t : {Target::Table1, Target::Table2, Target::Table3, Target::Fig1, Target::Fig2,
                     Target::Fig3})
        if (text == target_name(t)) return t;
    throw Error(ErrorKind::InvalidArgument,
                "unknown target '" + text + "' (expected table1, table2, table3, fig1, fig2, fig3)");
}

const char* target_name(Target target) {
    switch (target) {
        case Target::Table1: return "table1";
        case Target::Table2: return "table2";
        case Target::Table3: return "table3";
        case Target::Fig1: return "fig1";
        case Target::Fig2: return "fig2";
        case Target::Fig3: return "fig3";
    }
    return "unknown";
}

std::vector<std::string> target_configs(Target target) {
    switch (target) {
        case Target::Table1:
            return {"table1_theta_0.5.cfg", "table1_theta_1.0.cfg", "table1_theta_2.0.cfg"};
        case Target::Table2:
            return {"table2_2.0_0.0.cfg", "table2_2.0_0.5.cfg", "table2_3.0_0.5.cfg",
                    "table2_3.0_1.0.cfg", "table2_1.0_0.1.cfg", "table2_0.5_0.0.cfg"};
        case Target::Table3:
            return {"table3_row1.cfg", "table3_row2.cfg", "table3_row3.cfg"};
        case Target::Fig1: return {"t2_baseline.cfg"};
        case Target::Fig2: return {"t4_baseline.cfg"};
        case Target::Fig3: return {"fig3_tradeoff.cfg"};
    }
    return {};
}

RowResult run_row(const ExperimentConfig& config) {
    const std::vector<double> thresholds =
        config.sweep_grid ? *config.sweep_grid : default_threshold_grid();
    const IpidScenario scenario = config.scenario();
    const DetectionCostSpec costs = config.costs();
    const SimulationOptions sim = config.simulation_options();

    RowResult r;
    r.config = config;
    r.sweep = sweep_single_threshold(scenario, costs, thresholds, sim);
    r.solution = solve_detection(scenario, costs, config.solve_options());
    if (!r.solution.converged)
        throw Error(ErrorKind::NotConverged,
                    "value iteration did not converge within " + std::to_string(config.max_cycles) +
                        " cycles");
    const StoppingPolicy optimal = StoppingPolicy::periodic(r.solution.thresholds);
    r.optimal = estimate_bayes_cost(scenario, costs, optimal, sim);
    SimulationOptions aligned = sim;
    aligned.alignment = CostAlignment::Aligned;
    r.optimal_aligned = estimate_bayes_cost(scenario, costs, optimal, aligned);
    return r;
}

TradeoffResult run_tradeoff(const ExperimentConfig& config, double slack) {
    require(!config.alphas.empty(), "tradeoff needs at least one alpha");
    const IpidScenario scenario = config.scenario();
    const ChangePrior prior = ChangePrior::geometric(config.rho);
    TradeoffResult out;
    out.information = kl_information(scenario);
    out.tail_exponent = prior_tail_exponent(prior).value;
    std::vector<SimulationReport> conditional;
    for (double alpha : config.alphas) {
        TradeoffRow row;
        row.alpha = alpha;
        row.sim = estimate_add_pfa(scenario, config.rho, StoppingPolicy::single(1.0 - alpha),
                                   config.simulation_options());
        row.analytic = analytic_delay(alpha, out.information, out.tail_exponent);
        conditional.push_back(row.sim.conditional_add);
        out.rows.push_back(row);
    }
    out.bound = lower_bound_check(scenario, prior, config.alphas, conditional, slack);
    return out;
}

}  // namespace ipid

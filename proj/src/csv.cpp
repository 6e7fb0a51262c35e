#include "ipid/csv.hpp"

#include <cmath>
#include <cstdio>

namespace ipid::csv {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v);
    return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

void value_curves(std::ostream& out, const DetectionSolution& solution) {
    const std::size_t T = solution.stages.size();
    out << 'p';
    for (const char* part : {"cost", "stop", "continue"})
        for (std::size_t l = 0; l < T; ++l) out << ",stage_" << l << '_' << part;
    out << '\n';
    for (std::size_t i = 0; i < solution.grid.size(); ++i) {
        out << num(solution.grid[i]);
        for (std::size_t l = 0; l < T; ++l) out << ',' << num(solution.stages[l].value[i]);
        for (std::size_t l = 0; l < T; ++l) out << ',' << num(solution.stages[l].stop[i]);
        for (std::size_t l = 0; l < T; ++l) out << ',' << num(solution.stages[l].cont[i]);
        out << '\n';
    }
}

void history(std::ostream& out, const DetectionSolution& solution) {
    out << "cycle,l2,sup\n";
    for (std::size_t k = 0; k < solution.l2_history.size(); ++k)
        out << k + 1 << ',' << num(solution.l2_history[k]) << ',' << num(solution.sup_history[k])
            << '\n';
}

void iterates(std::ostream& out, const DetectionSolution& solution) {
    out << "cycle,p,value\n";
    for (std::size_t k = 0; k < solution.iterates.size(); ++k)
        for (std::size_t i = 0; i < solution.grid.size(); ++i)
            out << k + 1 << ',' << num(solution.grid[i]) << ',' << num(solution.iterates[k][i])
                << '\n';
}

void thresholds(std::ostream& out, const DetectionSolution& solution) {
    out << "stage,threshold,strict_threshold\n";
    for (std::size_t l = 0; l < solution.thresholds.size(); ++l)
        out << l << ',' << num(solution.thresholds[l]) << ',' << num(solution.strict_thresholds[l])
            << '\n';
}

void sweep(std::ostream& out, const SweepResult& sweep) {
    out << "A,cost,se\n";
    for (const SweepPoint& p : sweep.points)
        out << num(p.threshold) << ',' << num(p.report.estimate) << ','
            << num(p.report.standard_error) << '\n';
}

void reports(std::ostream& out, const std::vector<std::string>& policies,
             const std::vector<SimulationReport>& reports, CostAlignment alignment) {
    out << "policy,kind,estimate,se,paths,seed,horizon,censored_fraction,alignment\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const SimulationReport& r = reports[i];
        out << '"' << policies.at(i) << "\"," << estimate_name(r.kind) << ',' << num(r.estimate)
            << ',' << num(r.standard_error) << ',' << r.paths << ',' << r.seed << ',' << r.horizon
            << ',' << num(r.censored_fraction) << ',' << alignment_name(alignment) << '\n';
    }
}

void tradeoff(std::ostream& out, const TradeoffResult& result) {
    out << "alpha,abs_log_alpha,ADD_sim,ADD_cond_sim,PFA_sim,ADD_analytic,ADD_sim_se,"
           "ADD_cond_sim_se,PFA_sim_se,below_bound_slack,censored_fraction\n";
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const TradeoffRow& r = result.rows[i];
        out << num(r.alpha) << ',' << num(std::abs(std::log(r.alpha))) << ','
            << num(r.sim.add.estimate) << ',' << num(r.sim.conditional_add.estimate) << ','
            << num(r.sim.pfa.estimate) << ',' << num(r.analytic) << ','
            << num(r.sim.add.standard_error) << ',' << num(r.sim.conditional_add.standard_error)
            << ',' << num(r.sim.pfa.standard_error) << ','
            << (result.bound.at(i).below_slack ? 1 : 0) << ','
            << num(r.sim.add.censored_fraction) << '\n';
    }
}

void trace(std::ostream& out, const std::vector<TracePoint>& trace) {
    out << "n,y,p_n,nu_marker\n";
    for (const TracePoint& t : trace)
        out << t.n << ',' << num(t.y) << ',' << num(t.p) << ',' << (t.change ? 1 : 0) << '\n';
}

namespace {

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i]);
    return s;
}

}  // namespace

void reproduction(std::ostream& out, Target target, const std::vector<RowResult>& rows) {
    out << "table,label,lambda,delay,post_mean,best_A,single_cost,single_se,optimal_sim,"
           "optimal_se,optimal_dp,optimal_thresholds,optimal_aligned_sim,optimal_aligned_se,"
           "published_single,published_optimal,single_censored,optimal_censored\n";
    for (const RowResult& r : rows) {
        out << target_name(target) << ",\"" << r.config.label << "\",\"" << join(r.config.lambda)
            << "\",\"" << join(r.config.delay) << "\",\"" << join(r.config.post_mean) << "\","
            << num(r.best_threshold()) << ',' << num(r.single().estimate) << ','
            << num(r.single().standard_error) << ',' << num(r.optimal.estimate) << ','
            << num(r.optimal.standard_error) << ',' << num(r.solution.cost_at_zero) << ",\""
            << join(r.solution.thresholds) << "\"," << num(r.optimal_aligned.estimate) << ','
            << num(r.optimal_aligned.standard_error) << ',' << num(r.config.published_single)
            << ',' << num(r.config.published_optimal) << ',' << num(r.single().censored_fraction)
            << ',' << num(r.optimal.censored_fraction) << '\n';
    }
}

void mdp_solution(std::ostream& out, const StageValues& values, const PeriodicPolicy& policy) {
    out << "stage,state,value,action\n";
    for (std::size_t l = 0; l < policy.maps.size(); ++l)
        for (std::size_t s = 0; s < policy.maps[l].size(); ++s)
            out << l << ',' << s << ',' << num(values.stage_entry.at(l)[s]) << ','
                << policy.maps[l][s] << '\n';
}

}  // namespace ipid::csv

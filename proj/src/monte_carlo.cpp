#include "ipid/monte_carlo.hpp"

#include <cmath>
#include <sstream>

#include "ipid/belief.hpp"

namespace ipid {

std::size_t cost_stage(std::int64_t n, std::size_t period, CostAlignment alignment) {
    require(n >= 0, "time index must be >= 0");
    require(period >= 1, "period must be >= 1");
    const auto T = static_cast<std::int64_t>(period);
    if (alignment == CostAlignment::Aligned) return static_cast<std::size_t>(n % T);
    require(n >= 1, "lagged cost stage needs n >= 1");
    return static_cast<std::size_t>((n - 1) % T);
}

const char* alignment_name(CostAlignment alignment) {
    return alignment == CostAlignment::Aligned ? "aligned" : "lagged";
}

CostAlignment parse_alignment(const std::string& text) {
    if (text == "lagged") return CostAlignment::Lagged;
    if (text == "aligned") return CostAlignment::Aligned;
    throw Error(ErrorKind::Parse, "alignment must be 'lagged' or 'aligned', got '" + text + "'");
}

// ---------------------------------------------------------------------------
// Policies

namespace {

double threshold_log_odds(double a) {
    require(std::isfinite(a) && a >= 0.0 && a <= 1.0, "thresholds must lie in [0, 1]");
    return to_log_odds(a);
}

}  // namespace

StoppingPolicy StoppingPolicy::single(double threshold) {
    StoppingPolicy p;
    p.single_ = true;
    p.thresholds_ = {threshold};
    p.log_odds_ = {threshold_log_odds(threshold)};
    return p;
}

StoppingPolicy StoppingPolicy::periodic(std::vector<double> thresholds) {
    require(!thresholds.empty(), "periodic policy needs at least one threshold");
    StoppingPolicy p;
    p.single_ = false;
    for (double a : thresholds) p.log_odds_.push_back(threshold_log_odds(a));
    p.thresholds_ = std::move(thresholds);
    return p;
}

double StoppingPolicy::threshold(std::size_t stage) const {
    return single_ ? thresholds_[0] : thresholds_.at(stage);
}

double StoppingPolicy::log_odds_threshold(std::size_t stage) const {
    return single_ ? log_odds_[0] : log_odds_.at(stage);
}

void StoppingPolicy::validate(std::size_t period) const {
    if (!single_)
        require(thresholds_.size() == period,
                "policy has " + std::to_string(thresholds_.size()) + " thresholds, period is " +
                    std::to_string(period));
}

std::string StoppingPolicy::describe() const {
    std::ostringstream out;
    out << (single_ ? "single(" : "periodic(");
    for (std::size_t i = 0; i < thresholds_.size(); ++i) out << (i ? "," : "") << thresholds_[i];
    out << ')';
    return out.str();
}

// ---------------------------------------------------------------------------
// Path replay

PolicyRun run_policy(const SamplePath& path, const StoppingPolicy& policy, double rho,
                     const IpidScenario& scenario, CostAlignment alignment) {
    const std::size_t T = scenario.period();
    policy.validate(T);
    PolicyRun run;
    run.change_point = path.change_point;
    double log_r = -INFINITY;
    for (std::size_t i = 0; i < path.observations.size(); ++i) {
        const auto n = static_cast<std::int64_t>(i + 1);
        log_r = advance_log_odds(log_r, rho, scenario, stage_index(n, T), path.observations[i]);
        if (log_r > policy.log_odds_threshold(cost_stage(n, T, alignment))) {
            run.stop_time = n;
            break;
        }
    }
    return run;
}

std::vector<double> belief_trajectory(const SamplePath& path, double rho,
                                      const IpidScenario& scenario) {
    std::vector<double> p;
    p.reserve(path.observations.size());
    double log_r = -INFINITY;
    for (std::size_t i = 0; i < path.observations.size(); ++i) {
        const auto n = static_cast<std::int64_t>(i + 1);
        log_r = advance_log_odds(log_r, rho, scenario, stage_index(n, scenario.period()),
                                 path.observations[i]);
        p.push_back(from_log_odds(log_r));
    }
    return p;
}

// ---------------------------------------------------------------------------
// Engine

namespace {

constexpr std::int64_t kNoStop = -1;
constexpr std::int64_t kNoChange = -1;  // nu beyond the horizon

struct Outcome {
    std::int64_t nu = kNoChange;
    std::vector<std::int64_t> tau;  // per policy, kNoStop when censored
};

std::vector<Outcome> simulate_outcomes(const IpidScenario& scenario, double rho,
                                       const std::vector<StoppingPolicy>& policies,
                                       const SimulationOptions& options) {
    require(options.paths >= 1, "at least one path is required");
    require(!policies.empty(), "at least one policy is required");
    const std::size_t T = scenario.period();
    for (const StoppingPolicy& p : policies) p.validate(T);
    const std::int64_t horizon = resolve_horizon(options, rho);
    const ChangePrior prior = ChangePrior::geometric(rho);

    std::vector<Outcome> out(options.paths);
    parallel_for(options.paths, [&](std::size_t i) {
        PathStream stream(scenario, prior, horizon, options.seed, i);
        Outcome& o = out[i];
        o.nu = stream.change_point().value_or(kNoChange);
        o.tau.assign(policies.size(), kNoStop);
        std::size_t running = policies.size();
        double log_r = -INFINITY;
        while (running > 0 && !stream.exhausted()) {
            const std::int64_t n = stream.next_time();
            const double y = stream.next();
            log_r = advance_log_odds(log_r, rho, scenario, stage_index(n, T), y);
            const std::size_t s = cost_stage(n, T, options.alignment);
            for (std::size_t k = 0; k < policies.size(); ++k) {
                if (o.tau[k] == kNoStop && log_r > policies[k].log_odds_threshold(s)) {
                    o.tau[k] = n;
                    --running;
                }
            }
        }
    });
    return out;
}

struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++count;
    }
};

SimulationReport finish(EstimateKind kind, const Accumulator& acc, const SimulationOptions& options,
                        std::int64_t horizon, double censored) {
    SimulationReport r;
    r.kind = kind;
    r.paths = acc.count;
    r.seed = options.seed;
    r.horizon = horizon;
    r.censored_fraction = censored;
    if (acc.count == 0) {
        r.estimate = NAN;
        r.standard_error = NAN;
        return r;
    }
    const double n = static_cast<double>(acc.count);
    r.estimate = acc.sum / n;
    if (acc.count > 1) {
        const double var = std::max(0.0, (acc.sum_sq - n * r.estimate * r.estimate) / (n - 1.0));
        r.standard_error = std::sqrt(var / n);
    }
    return r;
}

double delay_cost(const DetectionCostSpec& costs, std::int64_t from, std::int64_t to_exclusive,
                  CostAlignment alignment) {
    double total = 0.0;
    const std::size_t T = costs.period();
    for (std::int64_t n = from; n < to_exclusive; ++n) total += costs.delay[cost_stage(n, T, alignment)];
    return total;
}

}  // namespace

std::int64_t resolve_horizon(const SimulationOptions& options, double rho) {
    if (options.horizon > 0) return options.horizon;
    require(rho > 0.0 && rho < 1.0, "rho must lie in (0, 1)");
    return static_cast<std::int64_t>(std::ceil(50.0 / rho));
}

const char* estimate_name(EstimateKind kind) {
    switch (kind) {
        case EstimateKind::BayesCost: return "bayes_cost";
        case EstimateKind::Add: return "add";
        case EstimateKind::ConditionalAdd: return "conditional_add";
        case EstimateKind::Pfa: return "pfa";
    }
    return "unknown";
}

std::vector<SimulationReport> estimate_bayes_costs(const IpidScenario& scenario,
                                                   const DetectionCostSpec& costs,
                                                   const std::vector<StoppingPolicy>& policies,
                                                   const SimulationOptions& options) {
    costs.validate(scenario.period());
    const std::int64_t horizon = resolve_horizon(options, costs.rho);
    const std::vector<Outcome> outcomes = simulate_outcomes(scenario, costs.rho, policies, options);
    const std::size_t T = scenario.period();

    std::vector<SimulationReport> reports;
    reports.reserve(policies.size());
    for (std::size_t k = 0; k < policies.size(); ++k) {
        Accumulator acc;
        std::size_t censored = 0;
        for (const Outcome& o : outcomes) {
            const std::int64_t tau = o.tau[k];
            const std::int64_t nu = o.nu;
            double cost = 0.0;
            if (tau == kNoStop) {
                ++censored;
                if (nu != kNoChange) cost = delay_cost(costs, nu, horizon + 1, options.alignment);
            } else if (nu == kNoChange || tau < nu) {
                cost = costs.false_alarm[cost_stage(tau, T, options.alignment)];
            } else {
                cost = delay_cost(costs, nu, tau, options.alignment);
            }
            acc.add(cost);
        }
        reports.push_back(finish(EstimateKind::BayesCost, acc, options, horizon,
                                 static_cast<double>(censored) / static_cast<double>(outcomes.size())));
    }
    return reports;
}

SimulationReport estimate_bayes_cost(const IpidScenario& scenario, const DetectionCostSpec& costs,
                                     const StoppingPolicy& policy,
                                     const SimulationOptions& options) {
    return estimate_bayes_costs(scenario, costs, {policy}, options).front();
}

std::vector<double> default_threshold_grid() {
    // Bayes cost is steep in A near zero, where the best single thresholds
    // of the bundled scenarios sit; resolve that end finely.
    std::vector<double> grid = {0.0};
    for (int i = 1; i <= 20; ++i) grid.push_back(0.001 * i);
    for (int i = 11; i <= 25; ++i) grid.push_back(0.002 * i);
    for (int i = 11; i <= 20; ++i) grid.push_back(0.005 * i);
    for (int i = 11; i <= 20; ++i) grid.push_back(0.01 * i);
    for (int i = 5; i <= 19; ++i) grid.push_back(0.05 * i);
    grid.push_back(0.99);
    return grid;
}

SweepResult sweep_single_threshold(const IpidScenario& scenario, const DetectionCostSpec& costs,
                                   const std::vector<double>& thresholds,
                                   const SimulationOptions& options) {
    require(!thresholds.empty(), "threshold grid is empty");
    std::vector<StoppingPolicy> policies;
    policies.reserve(thresholds.size());
    for (double a : thresholds) policies.push_back(StoppingPolicy::single(a));
    const std::vector<SimulationReport> reports =
        estimate_bayes_costs(scenario, costs, policies, options);

    SweepResult sweep;
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        sweep.points.push_back({thresholds[k], reports[k]});
        if (reports[k].estimate < reports[sweep.best].estimate) sweep.best = k;
    }
    return sweep;
}

AddPfaReport estimate_add_pfa(const IpidScenario& scenario, double rho,
                              const StoppingPolicy& policy, const SimulationOptions& options) {
    const std::int64_t horizon = resolve_horizon(options, rho);
    const std::vector<Outcome> outcomes = simulate_outcomes(scenario, rho, {policy}, options);
    Accumulator add, cond, pfa;
    std::size_t censored = 0;
    for (const Outcome& o : outcomes) {
        const bool stopped = o.tau[0] != kNoStop;
        const std::int64_t tau = stopped ? o.tau[0] : horizon + 1;
        censored += stopped ? 0 : 1;
        if (o.nu == kNoChange) {
            // nu > horizon: a stop is a false alarm, a censored path is neither.
            add.add(0.0);
            pfa.add(stopped ? 1.0 : 0.0);
            continue;
        }
        const bool false_alarm = tau < o.nu;
        pfa.add(false_alarm ? 1.0 : 0.0);
        add.add(false_alarm ? 0.0 : static_cast<double>(tau - o.nu));
        if (!false_alarm) cond.add(static_cast<double>(tau - o.nu));
    }
    const double frac = static_cast<double>(censored) / static_cast<double>(outcomes.size());
    return {finish(EstimateKind::Add, add, options, horizon, frac),
            finish(EstimateKind::ConditionalAdd, cond, options, horizon, frac),
            finish(EstimateKind::Pfa, pfa, options, horizon, frac)};
}

double analytic_delay(double alpha, double information, double tail_exponent) {
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    require(information > 0.0 && std::isfinite(information), "information number must be > 0");
    require(tail_exponent >= 0.0, "tail exponent must be >= 0");
    return std::abs(std::log(alpha)) / (information + tail_exponent);
}

std::vector<BoundComparison> lower_bound_check(const IpidScenario& scenario,
                                               const ChangePrior& prior,
                                               const std::vector<double>& alphas,
                                               const std::vector<SimulationReport>& conditional_add,
                                               double slack) {
    require(alphas.size() == conditional_add.size(), "one simulated delay per alpha is required");
    const double information = kl_information(scenario);
    const double d = prior_tail_exponent(prior).value;
    std::vector<BoundComparison> rows;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        BoundComparison row;
        row.alpha = alphas[i];
        row.simulated = conditional_add[i].estimate;
        row.standard_error = conditional_add[i].standard_error;
        row.bound = analytic_delay(alphas[i], information, d);
        row.below_slack = row.simulated < slack * row.bound;
        rows.push_back(row);
    }
    return rows;
}

std::vector<TracePoint> trace_path(const IpidScenario& scenario, double rho,
                                   const StoppingPolicy& policy, std::int64_t horizon,
                                   std::uint64_t seed, std::uint64_t stream) {
    require(horizon >= 1, "horizon must be >= 1");
    const std::size_t T = scenario.period();
    policy.validate(T);
    PathStream path(scenario, ChangePrior::geometric(rho), horizon, seed, stream);
    const std::int64_t nu = path.change_point().value_or(kNoChange);
    std::vector<TracePoint> trace;
    double log_r = -INFINITY;
    while (!path.exhausted()) {
        const std::int64_t n = path.next_time();
        const double y = path.next();
        log_r = advance_log_odds(log_r, rho, scenario, stage_index(n, T), y);
        trace.push_back({n, y, from_log_odds(log_r), n == nu});
        if (log_r > policy.log_odds_threshold(cost_stage(n, T, CostAlignment::Lagged))) break;
    }
    return trace;
}

}  // namespace ipid

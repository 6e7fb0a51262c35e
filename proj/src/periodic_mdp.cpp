#include "ipid/periodic_mdp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ipid/kernels.hpp"
#include "ipid/random.hpp"

namespace ipid {

namespace {

// Below this many states the thread start-up costs more than the sweep.
constexpr std::size_t kParallelStateThreshold = 512;

void for_each_state(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (n >= kParallelStateThreshold) {
        parallel_for(n, body);
    } else {
        for (std::size_t s = 0; s < n; ++s) body(s);
    }
}

void check_value(const ValueVector& value, const PeriodicMdp& mdp) {
    require(value.size() == mdp.states(), "value vector has " + std::to_string(value.size()) +
                                              " entries, MDP has " +
                                              std::to_string(mdp.states()) + " states");
}

}  // namespace

// ---------------------------------------------------------------------------
// PeriodicMdp

PeriodicMdp::PeriodicMdp(std::size_t states, std::size_t actions, std::size_t period,
                         double discount)
    : states_(states), actions_(actions), period_(period), discount_(discount) {
    require(states >= 1, "MDP needs at least one state");
    require(actions >= 1, "MDP needs at least one action");
    require(period >= 1, "MDP period must be >= 1");
    require(discount >= 0.0 && discount <= 1.0, "discount must lie in [0, 1]");
    kernel_.assign(period * states * actions * states, 0.0);
    cost_.assign(period * states * actions, 0.0);
}

std::size_t PeriodicMdp::index(std::size_t stage, std::size_t state, std::size_t action) const {
    require(stage < period_ && state < states_ && action < actions_,
            "MDP index out of range (stage " + std::to_string(stage) + ", state " +
                std::to_string(state) + ", action " + std::to_string(action) + ")");
    return (stage * states_ + state) * actions_ + action;
}

void PeriodicMdp::set_transition(std::size_t stage, std::size_t state, std::size_t action,
                                 std::span<const double> row) {
    require(row.size() == states_, "transition row needs one entry per state");
    std::copy(row.begin(), row.end(), kernel_.begin() + index(stage, state, action) * states_);
}

void PeriodicMdp::set_cost(std::size_t stage, std::size_t state, std::size_t action, double cost) {
    cost_[index(stage, state, action)] = cost;
}

std::span<const double> PeriodicMdp::transition(std::size_t stage, std::size_t state,
                                                std::size_t action) const {
    return {kernel_.data() + index(stage, state, action) * states_, states_};
}

double PeriodicMdp::cost(std::size_t stage, std::size_t state, std::size_t action) const {
    return cost_[index(stage, state, action)];
}

double PeriodicMdp::max_cost() const {
    double m = 0.0;
    for (double c : cost_) m = std::max(m, c);
    return m;
}

void PeriodicMdp::validate() const {
    for (std::size_t l = 0; l < period_; ++l)
        for (std::size_t s = 0; s < states_; ++s)
            for (std::size_t a = 0; a < actions_; ++a) {
                const std::string where = " at stage " + std::to_string(l) + ", state " +
                                          std::to_string(s) + ", action " + std::to_string(a);
                const double c = cost(l, s, a);
                require(std::isfinite(c) && c >= 0.0, "cost must be finite and >= 0" + where);
                double sum = 0.0;
                for (double p : transition(l, s, a)) {
                    require(std::isfinite(p) && p >= 0.0,
                            "transition probabilities must be >= 0" + where);
                    sum += p;
                }
                require(std::abs(sum - 1.0) <= 1e-12,
                        "transition row does not sum to 1" + where);
            }
}

PeriodicPolicy PeriodicPolicy::stationary(ActionMap map, std::size_t period) {
    return PeriodicPolicy{std::vector<ActionMap>(period, std::move(map))};
}

// ---------------------------------------------------------------------------
// Operators

ValueVector apply_stage_operator(const ValueVector& value, const PeriodicMdp& mdp,
                                 std::size_t stage) {
    check_value(value, mdp);
    const auto& k = kernels::active();
    const double alpha = mdp.discount();
    ValueVector out(mdp.states());
    for_each_state(mdp.states(), [&](std::size_t s) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < mdp.actions(); ++a) {
            const auto row = mdp.transition(stage, s, a);
            const double q = mdp.cost(stage, s, a) + alpha * k.dot(row.data(), value.data(), row.size());
            if (q < best) best = q;
        }
        out[s] = best;
    });
    return out;
}

ValueVector apply_policy_operator(const ValueVector& value, const PeriodicMdp& mdp,
                                  std::size_t stage, const ActionMap& policy) {
    check_value(value, mdp);
    require(policy.size() == mdp.states(), "action map needs one action per state");
    const auto& k = kernels::active();
    ValueVector out(mdp.states());
    for_each_state(mdp.states(), [&](std::size_t s) {
        const auto row = mdp.transition(stage, s, policy[s]);
        out[s] = mdp.cost(stage, s, policy[s]) +
                 mdp.discount() * k.dot(row.data(), value.data(), row.size());
    });
    return out;
}

std::vector<ValueVector> compose_stages(const ValueVector& value, std::size_t period,
                                        const StageOperator& op) {
    std::vector<ValueVector> entry(period);
    const ValueVector* next = &value;
    for (std::size_t l = period; l-- > 0;) {
        entry[l] = op(*next, l);
        next = &entry[l];
    }
    return entry;
}

CycleResult apply_cycle_operator(const ValueVector& value, const PeriodicMdp& mdp) {
    CycleResult r;
    r.stage_entry = compose_stages(value, mdp.period(), [&](const ValueVector& v, std::size_t l) {
        return apply_stage_operator(v, mdp, l);
    });
    r.value = r.stage_entry.front();
    return r;
}

StageValues iterate_cycles(std::size_t states, std::size_t period, const StageOperator& op,
                           const ValueIterationOptions& options) {
    require(options.tol > 0.0, "value iteration tolerance must be > 0");
    require(options.max_cycles >= 1, "value iteration needs max_cycles >= 1");

    StageValues out;
    out.value.assign(states, 0.0);
    for (std::size_t cycle = 0; cycle < options.max_cycles; ++cycle) {
        std::vector<ValueVector> entry = compose_stages(out.value, period, op);
        ValueVector next = entry.front();

        double sup = 0.0, sq = 0.0;
        for (std::size_t s = 0; s < states; ++s) {
            const double diff = next[s] - out.value[s];
            if (diff < -1e-12 * (1.0 + std::abs(out.value[s]))) out.monotone = false;
            sup = std::max(sup, std::abs(diff));
            sq += diff * diff;
        }
        out.sup_history.push_back(sup);
        out.l2_history.push_back(std::sqrt(sq));
        out.previous = std::move(out.value);
        out.value = std::move(next);
        out.stage_entry = std::move(entry);
        out.cycles = cycle + 1;
        if (sup <= options.tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

ValueIterationOptions default_iteration_options(double discount) {
    ValueIterationOptions o;
    if (discount >= 1.0) o.tol = 1e-6;
    return o;
}

StageValues value_iterate(const PeriodicMdp& mdp, const ValueIterationOptions& options) {
    mdp.validate();
    return iterate_cycles(mdp.states(), mdp.period(), [&](const ValueVector& v, std::size_t l) {
        return apply_stage_operator(v, mdp, l);
    }, options);
}

PeriodicPolicy extract_periodic_policy(const StageValues& values, const PeriodicMdp& mdp) {
    check_value(values.value, mdp);
    const std::size_t T = mdp.period();
    // Compositions Psi_{l+1} ... Psi_{T-1}(V) for the terminal V.
    const CycleResult cycle = apply_cycle_operator(values.value, mdp);
    PeriodicPolicy policy;
    policy.maps.resize(T);
    for (std::size_t l = 0; l < T; ++l) {
        const ValueVector& next = l + 1 < T ? cycle.stage_entry[l + 1] : values.value;
        ActionMap& map = policy.maps[l];
        map.resize(mdp.states());
        for (std::size_t s = 0; s < mdp.states(); ++s) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_a = 0;
            for (std::size_t a = 0; a < mdp.actions(); ++a) {
                const auto row = mdp.transition(l, s, a);
                double ev = 0.0;
                for (std::size_t j = 0; j < row.size(); ++j) ev += row[j] * next[j];
                const double q = mdp.cost(l, s, a) + mdp.discount() * ev;
                if (q < best) {
                    best = q;
                    best_a = a;
                }
            }
            map[s] = best_a;
        }
    }
    return policy;
}

double fixed_point_residual(const ValueVector& value, const PeriodicMdp& mdp) {
    const ValueVector next = apply_cycle_operator(value, mdp).value;
    double r = 0.0;
    for (std::size_t s = 0; s < value.size(); ++s) r = std::max(r, std::abs(next[s] - value[s]));
    return r;
}

double fixed_point_residual(const StageValues& values, const PeriodicMdp& mdp) {
    return fixed_point_residual(values.value, mdp);
}

// ---------------------------------------------------------------------------
// Oracles

ValueVector finite_horizon_oracle(const PeriodicMdp& mdp, std::size_t horizon) {
    require(horizon % mdp.period() == 0, "oracle horizon must be a multiple of the period");
    const std::size_t S = mdp.states();
    ValueVector to_go(S, 0.0), next(S);
    for (std::size_t k = horizon; k-- > 0;) {
        const std::size_t l = k % mdp.period();
        for (std::size_t s = 0; s < S; ++s) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < mdp.actions(); ++a) {
                const auto row = mdp.transition(l, s, a);
                double ev = 0.0;
                for (std::size_t j = 0; j < S; ++j) ev += row[j] * to_go[j];
                best = std::min(best, mdp.cost(l, s, a) + mdp.discount() * ev);
            }
            next[s] = best;
        }
        std::swap(to_go, next);
    }
    return to_go;
}

ValueVector evaluate_policy(const PeriodicMdp& mdp, const PeriodicPolicy& policy,
                            std::size_t horizon) {
    require(policy.maps.size() == mdp.period(), "policy needs one action map per stage");
    const std::size_t S = mdp.states();
    ValueVector to_go(S, 0.0), next(S);
    for (std::size_t k = horizon; k-- > 0;) {
        const std::size_t l = k % mdp.period();
        for (std::size_t s = 0; s < S; ++s) {
            const std::size_t a = policy.maps[l].at(s);
            const auto row = mdp.transition(l, s, a);
            double ev = 0.0;
            for (std::size_t j = 0; j < S; ++j) ev += row[j] * to_go[j];
            next[s] = mdp.cost(l, s, a) + mdp.discount() * ev;
        }
        std::swap(to_go, next);
    }
    return to_go;
}

PolicyCostEstimate simulate_policy_cost(const PeriodicMdp& mdp, const PeriodicPolicy& policy,
                                        std::size_t start, std::size_t paths,
                                        std::size_t horizon, std::uint64_t seed) {
    require(paths >= 1, "simulation needs at least one path");
    require(start < mdp.states(), "start state out of range");
    require(policy.maps.size() == mdp.period(), "policy needs one action map per stage");

    std::vector<double> totals(paths);
    parallel_for(paths, [&](std::size_t i) {
        RandomSource rng(seed, i);
        std::size_t s = start;
        double discount = 1.0, total = 0.0;
        for (std::size_t k = 0; k < horizon; ++k) {
            const std::size_t l = k % mdp.period();
            const std::size_t a = policy.maps[l].at(s);
            total += discount * mdp.cost(l, s, a);
            discount *= mdp.discount();
            // Inverse-CDF draw of the successor; one uniform per step.
            const auto row = mdp.transition(l, s, a);
            const double u = rng.uniform();
            double cum = 0.0;
            std::size_t next = row.size() - 1;
            for (std::size_t j = 0; j < row.size(); ++j) {
                cum += row[j];
                if (u < cum) {
                    next = j;
                    break;
                }
            }
            s = next;
        }
        totals[i] = total;
    });

    double mean = 0.0;
    for (double t : totals) mean += t;
    mean /= static_cast<double>(paths);
    double var = 0.0;
    for (double t : totals) var += (t - mean) * (t - mean);
    var = paths > 1 ? var / static_cast<double>(paths - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(paths)), paths};
}

}  // namespace ipid

#include "ipid/belief.hpp"

#include <cmath>

#include "ipid/common.hpp"

namespace ipid {

namespace {

double log_add_exp(double a, double b) {
    if (a == -INFINITY) return b;
    if (b == -INFINITY) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(-std::abs(a - b)));
}

double stage_llr(const IpidScenario& scenario, std::size_t stage, double y) {
    if (!std::isfinite(y)) throw Error(ErrorKind::Numerical, "observation is not finite");
    const double lg = scenario.post(stage).log_pdf(y);
    const double lf = scenario.pre(stage).log_pdf(y);
    if (lg == -INFINITY && lf == -INFINITY)
        throw Error(ErrorKind::Numerical, "observation outside both supports");
    return lg - lf;
}

}  // namespace

double to_log_odds(double p) {
    if (p <= 0.0) return -INFINITY;
    if (p >= 1.0) return INFINITY;
    return std::log(p) - std::log1p(-p);
}

double from_log_odds(double log_r) {
    if (log_r >= 0.0) return 1.0 / (1.0 + std::exp(-log_r));
    const double e = std::exp(log_r);
    return e / (1.0 + e);
}

double predicted_log_odds(double log_r, double rho) {
    // p~ / (1 - p~) = (R + rho) / (1 - rho)
    if (log_r == INFINITY) return INFINITY;
    return log_add_exp(log_r, std::log(rho)) - std::log1p(-rho);
}

double advance_log_odds(double log_r, double rho, const IpidScenario& scenario, std::size_t stage,
                        double y) {
    const double llr = stage_llr(scenario, stage, y);
    if (log_r == INFINITY) return INFINITY;
    return predicted_log_odds(log_r, rho) + llr;
}

BeliefState update_belief(const BeliefState& state, const ChangePrior& prior,
                          const IpidScenario& scenario, double y) {
    require(prior.is_geometric(), "update_belief needs a geometric prior; use update_odds_general");
    require(state.p >= 0.0 && state.p <= 1.0, "belief must lie in [0, 1]");
    const std::int64_t n = state.n + 1;
    const std::size_t stage = stage_index(n, scenario.period());
    const double log_r = advance_log_odds(to_log_odds(state.p), prior.rho(), scenario, stage, y);
    return {from_log_odds(log_r), n};
}

OddsState update_odds_general(const OddsState& state, const ChangePrior& prior,
                              const IpidScenario& scenario, double y) {
    const std::int64_t n = state.n + 1;
    const double log_tail_n = prior.log_tail(n);
    if (log_tail_n == -INFINITY) throw Error(ErrorKind::Numerical, "prior tail exhausted");
    const std::size_t stage = stage_index(n, scenario.period());
    const double llr = stage_llr(scenario, stage, y);
    if (state.log_r == INFINITY) return {INFINITY, n};

    // R_n = (R_{n-1} P(nu >= n) / P(nu > n) + pi_n / P(nu > n)) * LR_n
    const double carried = state.log_r + prior.log_tail(n - 1) - log_tail_n;
    const double fresh = prior.log_mass(n) - log_tail_n;
    return {log_add_exp(carried, fresh) + llr, n};
}

OddsState update_odds_geometric(const OddsState& state, double rho, const IpidScenario& scenario,
                                double y) {
    require(rho > 0.0 && rho < 1.0, "rho must lie in (0, 1)");
    const std::int64_t n = state.n + 1;
    const std::size_t stage = stage_index(n, scenario.period());
    return {advance_log_odds(state.log_r, rho, scenario, stage, y), n};
}

}  // namespace ipid

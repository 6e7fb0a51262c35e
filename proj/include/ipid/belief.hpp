#pragma once

// Posterior change probability p_n and odds R_n = p_n / (1 - p_n).
//
// All recursions run on log R so that long pre-change stretches (p -> 0) and
// long post-change stretches (p -> 1) stay representable. log R = +inf is the
// absorbing "change certain" state and log R = -inf encodes R = 0.

#include <cstdint>

#include "ipid/model.hpp"

namespace ipid {

struct BeliefState {
    double p = 0.0;
    std::int64_t n = 0;
};

struct OddsState {
    double log_r = -INFINITY;
    std::int64_t n = 0;
};

double to_log_odds(double p);
double from_log_odds(double log_r);

// log odds of p~ = p + (1 - p) rho given log odds of p.
double predicted_log_odds(double log_r, double rho);

// One step of the posterior recursion for a geometric prior. Throws when both
// densities vanish at y.
BeliefState update_belief(const BeliefState& state, const ChangePrior& prior,
                          const IpidScenario& scenario, double y);

// Odds recursion for an arbitrary prior. Throws when P(nu > n) = 0.
OddsState update_odds_general(const OddsState& state, const ChangePrior& prior,
                              const IpidScenario& scenario, double y);

OddsState update_odds_geometric(const OddsState& state, double rho, const IpidScenario& scenario,
                                double y);

// Shared step on log odds: stage is 0-based.
double advance_log_odds(double log_r, double rho, const IpidScenario& scenario, std::size_t stage,
                        double y);

}  // namespace ipid

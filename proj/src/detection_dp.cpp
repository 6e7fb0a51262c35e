#include "ipid/detection_dp.hpp"

#include <cmath>
#include <sstream>

#include "ipid/belief.hpp"
#include "ipid/quadrature.hpp"

namespace ipid {

namespace {

constexpr std::size_t kParallelGridThreshold = 512;

std::string stage_label(std::size_t stage) { return "stage " + std::to_string(stage); }

}  // namespace

// ---------------------------------------------------------------------------
// Costs and grid

void DetectionCostSpec::validate(std::size_t period) const {
    require(false_alarm.size() == period,
            "false-alarm penalty list has " + std::to_string(false_alarm.size()) +
                " entries, period is " + std::to_string(period));
    require(delay.size() == period, "delay penalty list has " + std::to_string(delay.size()) +
                                        " entries, period is " + std::to_string(period));
    for (double l : false_alarm)
        require(std::isfinite(l) && l > 0.0, "false-alarm penalties must be finite and > 0");
    for (double d : delay)
        require(std::isfinite(d) && d >= 0.0, "delay penalties must be finite and >= 0");
    require(rho > 0.0 && rho < 1.0, "rho must lie in (0, 1)");
}

DetectionCostSpec DetectionCostSpec::classical(double lambda_f, double rho, std::size_t period) {
    return DetectionCostSpec{std::vector<double>(period, lambda_f), std::vector<double>(period, 1.0),
                             rho};
}

BeliefGrid::BeliefGrid(std::size_t points) {
    require(points >= 2, "belief grid needs at least two points");
    points_.resize(points);
    const double denom = static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) points_[i] = static_cast<double>(i) / denom;
    points_.back() = 1.0;
}

double BeliefGrid::interpolate(std::span<const double> values, double p) const {
    require(values.size() == size(), "grid curve has the wrong length");
    const double t = std::clamp(p, 0.0, 1.0) * static_cast<double>(size() - 1);
    const std::size_t j = std::min(static_cast<std::size_t>(t), size() - 2);
    const double frac = t - static_cast<double>(j);
    return values[j] + frac * (values[j + 1] - values[j]);
}

// ---------------------------------------------------------------------------
// Quadrature

StageQuadrature::StageQuadrature(const IpidScenario& scenario, std::size_t stage,
                                 const QuadratureSpec& spec) {
    require(stage < scenario.period(), "stage out of range");
    const StageDensity& f = scenario.pre(stage);
    const StageDensity& g = scenario.post(stage);
    if (spec.window) {
        lo_ = spec.window->first;
        hi_ = spec.window->second;
        require(lo_ < hi_, "quadrature window must have lo < hi");
        for (const StageDensity* d : {&f, &g}) {
            if (d->mean() < lo_ || d->mean() > hi_) {
                std::ostringstream msg;
                msg << "quadrature window [" << lo_ << ", " << hi_ << "] excludes the "
                    << (d == &g ? "post" : "pre") << "-change mean " << d->mean() << " at "
                    << stage_label(stage);
                throw Error(ErrorKind::InvalidArgument, msg.str());
            }
        }
    } else {
        require(spec.half_width_sd > 0.0, "quadrature half width must be > 0");
        lo_ = std::min(f.mean() - spec.half_width_sd * f.stddev(),
                       g.mean() - spec.half_width_sd * g.stddev());
        hi_ = std::max(f.mean() + spec.half_width_sd * f.stddev(),
                       g.mean() + spec.half_width_sd * g.stddev());
    }

    const SimpsonRule rule = make_simpson_rule(lo_, hi_, spec.nodes);
    x_ = rule.nodes;
    const std::size_t K = x_.size();
    post_weighted_.resize(K);
    pre_weighted_.resize(K);
    odds_ratio_.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double lg = g.log_pdf(x_[k]);
        const double lf = f.log_pdf(x_[k]);
        post_weighted_[k] = rule.weights[k] * std::exp(lg);
        pre_weighted_[k] = rule.weights[k] * std::exp(lf);
        odds_ratio_[k] = std::exp(lf - lg);
    }
}

kernels::MixtureNodes StageQuadrature::nodes() const {
    return {post_weighted_.data(), pre_weighted_.data(), odds_ratio_.data(), x_.size()};
}

// ---------------------------------------------------------------------------
// Operators

double belief_transition(double p, double rho, const IpidScenario& scenario, std::size_t stage,
                         double x) {
    require(p >= 0.0 && p <= 1.0, "belief must lie in [0, 1]");
    require(stage < scenario.period(), "stage out of range");
    return from_log_odds(advance_log_odds(to_log_odds(p), rho, scenario, stage, x));
}

double continuation_integral(std::span<const double> values, const BeliefGrid& grid, double p,
                             double rho, const StageQuadrature& quadrature) {
    require(values.size() == grid.size(), "grid curve has the wrong length");
    require(p >= 0.0 && p <= 1.0, "belief must lie in [0, 1]");
    const double p_tilde = p + (1.0 - p) * rho;
    return kernels::active().continuation(quadrature.nodes(), p_tilde, values.data(), grid.size());
}

double continuation_integral(std::span<const double> values, const BeliefGrid& grid, double p,
                             double rho, const IpidScenario& scenario, std::size_t stage,
                             const QuadratureSpec& spec) {
    return continuation_integral(values, grid, p, rho, StageQuadrature(scenario, stage, spec));
}

StageCurves stage_bellman_curves(std::span<const double> next, std::size_t stage,
                                 const DetectionCostSpec& costs, const BeliefGrid& grid,
                                 const StageQuadrature& quadrature) {
    require(next.size() == grid.size(), "grid curve has the wrong length");
    const std::size_t M = grid.size();
    const double lambda = costs.false_alarm.at(stage);
    const double d = costs.delay.at(stage);
    StageCurves c;
    c.stop.resize(M);
    c.cont.resize(M);
    c.value.resize(M);
    auto point = [&](std::size_t i) {
        const double p = grid[i];
        c.stop[i] = lambda * (1.0 - p);
        c.cont[i] = d * p + continuation_integral(next, grid, p, costs.rho, quadrature);
        c.value[i] = std::min(c.stop[i], c.cont[i]);
    };
    if (M >= kParallelGridThreshold) {
        parallel_for(M, point);
    } else {
        for (std::size_t i = 0; i < M; ++i) point(i);
    }
    return c;
}

ValueVector stage_bellman(std::span<const double> next, std::size_t stage,
                          const DetectionCostSpec& costs, const BeliefGrid& grid,
                          const StageQuadrature& quadrature) {
    return stage_bellman_curves(next, stage, costs, grid, quadrature).value;
}

// ---------------------------------------------------------------------------
// Thresholds

namespace {

bool prefers_stop(const StageCurves& c, std::size_t i, TieRule rule) {
    return rule == TieRule::Stop ? c.stop[i] <= c.cont[i] : c.stop[i] < c.cont[i];
}

}  // namespace

std::vector<double> extract_thresholds(const std::vector<StageCurves>& stages,
                                       const BeliefGrid& grid, TieRule rule) {
    std::vector<double> out;
    out.reserve(stages.size());
    for (const StageCurves& c : stages) {
        require(c.stop.size() == grid.size() && c.cont.size() == grid.size(),
                "stage curves do not match the grid");
        double threshold = 1.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (prefers_stop(c, i, rule)) {
                threshold = grid[i];
                break;
            }
        }
        out.push_back(threshold);
    }
    return out;
}

bool stopping_set_is_upper_interval(const StageCurves& curves, TieRule rule) {
    bool entered = false;
    for (std::size_t i = 0; i < curves.stop.size(); ++i) {
        const bool stop = prefers_stop(curves, i, rule);
        if (entered && !stop) return false;
        entered = entered || stop;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Solver

DetectionSolution solve_detection(const IpidScenario& scenario, const DetectionCostSpec& costs,
                                  const DetectionSolveOptions& options) {
    const std::size_t T = scenario.period();
    costs.validate(T);

    DetectionSolution sol;
    sol.grid = BeliefGrid(options.grid_points);
    std::vector<StageQuadrature> quad;
    quad.reserve(T);
    for (std::size_t l = 0; l < T; ++l) quad.emplace_back(scenario, l, options.quadrature);

    const StageOperator op = [&](const ValueVector& next, std::size_t l) {
        ValueVector out = stage_bellman(next, l, costs, sol.grid, quad[l]);
        if (options.record_iterates && l == 0) sol.iterates.push_back(out);
        return out;
    };
    const StageValues iter = iterate_cycles(sol.grid.size(), T, op,
                                            ValueIterationOptions{options.tol, options.max_cycles});

    sol.optimal_cost = iter.value;
    sol.l2_history = iter.l2_history;
    sol.sup_history = iter.sup_history;
    sol.cycles = iter.cycles;
    sol.converged = iter.converged;
    sol.monotone = iter.monotone;

    // Stage curves from the converged J*: stage l compares lambda_l (1 - p)
    // against the continuation through stages l+1 .. T-1 and back to J*.
    sol.stages.resize(T);
    const ValueVector* next = &sol.optimal_cost;
    for (std::size_t l = T; l-- > 0;) {
        sol.stages[l] = stage_bellman_curves(*next, l, costs, sol.grid, quad[l]);
        next = &sol.stages[l].value;
    }
    double residual = 0.0;
    for (std::size_t i = 0; i < sol.grid.size(); ++i)
        residual = std::max(residual, std::abs(sol.stages[0].value[i] - sol.optimal_cost[i]));
    sol.residual = residual;
    sol.cost_at_zero = sol.stages[0].value[0];
    sol.thresholds = extract_thresholds(sol.stages, sol.grid, TieRule::Stop);
    sol.strict_thresholds = extract_thresholds(sol.stages, sol.grid, TieRule::Continue);
    return sol;
}

std::vector<std::string> check_solution_invariants(const DetectionSolution& solution,
                                                   const DetectionCostSpec& costs, double tol,
                                                   double concavity_tol) {
    std::vector<std::string> issues;
    const std::size_t M = solution.grid.size();
    for (std::size_t l = 0; l < solution.stages.size(); ++l) {
        const StageCurves& c = solution.stages[l];
        const double lambda = costs.false_alarm.at(l);
        for (std::size_t i = 0; i < M; ++i) {
            const double cap = lambda * (1.0 - solution.grid[i]);
            if (c.value[i] < -1e-12)
                issues.push_back(stage_label(l) + ": negative cost at grid index " +
                                 std::to_string(i));
            if (c.value[i] > cap + 1e-12)
                issues.push_back(stage_label(l) + ": cost above lambda (1 - p) at grid index " +
                                 std::to_string(i));
        }
        if (std::abs(c.value[M - 1]) > 1e-12)
            issues.push_back(stage_label(l) + ": cost at p = 1 is not zero");
        for (std::size_t i = 1; i + 1 < M; ++i) {
            const double second = c.value[i - 1] - 2.0 * c.value[i] + c.value[i + 1];
            if (second > concavity_tol) {
                issues.push_back(stage_label(l) + ": not concave at grid index " +
                                 std::to_string(i) + " (second difference " +
                                 std::to_string(second) + ")");
                break;
            }
        }
        if (!stopping_set_is_upper_interval(c))
            issues.push_back(stage_label(l) + ": stopping set is not an upper interval");
    }
    if (!solution.monotone) issues.emplace_back("value iterates were not monotone");
    if (!solution.converged) issues.emplace_back("value iteration did not converge");
    if (solution.residual > tol)
        issues.push_back("fixed-point residual " + std::to_string(solution.residual) +
                         " exceeds tolerance");
    return issues;
}

PeriodicMdp compile_grid_mdp(const IpidScenario& scenario, const DetectionCostSpec& costs,
                             const BeliefGrid& grid, const QuadratureSpec& spec) {
    const std::size_t T = scenario.period();
    costs.validate(T);
    const std::size_t M = grid.size();
    const std::size_t stopped = M;
    PeriodicMdp mdp(M + 1, 2, T, 1.0);

    std::vector<double> row(M + 1);
    for (std::size_t l = 0; l < T; ++l) {
        const StageQuadrature quad(scenario, l, spec);
        const kernels::MixtureNodes nodes = quad.nodes();
        for (std::size_t i = 0; i < M; ++i) {
            const double p = grid[i];
            std::fill(row.begin(), row.end(), 0.0);
            row[stopped] = 1.0;
            mdp.set_transition(l, i, 0, row);
            mdp.set_cost(l, i, 0, costs.false_alarm[l] * (1.0 - p));

            std::fill(row.begin(), row.end(), 0.0);
            const double p_tilde = p + (1.0 - p) * costs.rho;
            const double q = 1.0 - p_tilde;
            for (std::size_t k = 0; k < nodes.count; ++k) {
                const double density =
                    p_tilde * nodes.post_weighted[k] + q * nodes.pre_weighted[k];
                const double posterior =
                    q <= 0.0 ? 1.0 : p_tilde / (p_tilde + q * nodes.odds_ratio[k]);
                const double t = posterior * static_cast<double>(M - 1);
                const std::size_t j = std::min(static_cast<std::size_t>(t), M - 2);
                const double frac = t - static_cast<double>(j);
                row[j] += density * (1.0 - frac);
                row[j + 1] += density * frac;
            }
            double sum = 0.0;
            for (double v : row) sum += v;
            for (double& v : row) v /= sum;
            mdp.set_transition(l, i, 1, row);
            mdp.set_cost(l, i, 1, costs.delay[l] * p);
        }
        std::fill(row.begin(), row.end(), 0.0);
        row[stopped] = 1.0;
        for (std::size_t a = 0; a < 2; ++a) {
            mdp.set_transition(l, stopped, a, row);
            mdp.set_cost(l, stopped, a, 0.0);
        }
    }
    return mdp;
}

}  // namespace ipid

#pragma once

// Bayesian change detection as a periodic belief-state MDP.
//
// With belief p at stage l, stopping costs lambda_l (1 - p) and continuing
// costs d_l p plus the expected next-stage cost
//     A_J(p) = int J(phi_l(p, x)) (p~ g_l(x) + (1 - p~) f_l(x)) dx,
// with p~ = p + (1 - p) rho and phi_l the posterior after observing x. Stage l
// observes the law of time index l + 1. Curves live on a uniform belief grid
// and are interpolated linearly between grid points.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ipid/common.hpp"
#include "ipid/kernels.hpp"
#include "ipid/model.hpp"
#include "ipid/periodic_mdp.hpp"

namespace ipid {

struct DetectionCostSpec {
    std::vector<double> false_alarm;  // lambda_0 .. lambda_{T-1}, each > 0
    std::vector<double> delay;        // d_0 .. d_{T-1}, each >= 0
    double rho = 0.01;

    std::size_t period() const { return false_alarm.size(); }
    void validate(std::size_t period) const;

    // lambda_l = lambda_f and d_l = 1 for every stage.
    static DetectionCostSpec classical(double lambda_f, double rho, std::size_t period = 1);
};

class BeliefGrid {
public:
    explicit BeliefGrid(std::size_t points);

    std::size_t size() const { return points_.size(); }
    double step() const { return 1.0 / static_cast<double>(points_.size() - 1); }
    double operator[](std::size_t i) const { return points_[i]; }
    const std::vector<double>& points() const { return points_; }

    double interpolate(std::span<const double> values, double p) const;

private:
    std::vector<double> points_;
};

struct QuadratureSpec {
    std::size_t nodes = 1601;
    double half_width_sd = 8.0;
    // Explicit integration window; must contain every stage mean.
    std::optional<std::pair<double, double>> window;
};

// Nodes and mixture weights of the continuation integral for one stage.
class StageQuadrature {
public:
    StageQuadrature(const IpidScenario& scenario, std::size_t stage, const QuadratureSpec& spec);

    kernels::MixtureNodes nodes() const;
    const std::vector<double>& abscissae() const { return x_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    double lo_ = 0.0, hi_ = 0.0;
    std::vector<double> x_;
    std::vector<double> post_weighted_;
    std::vector<double> pre_weighted_;
    std::vector<double> odds_ratio_;
};

// Posterior after observing x at stage l (0-based) from prior belief p.
double belief_transition(double p, double rho, const IpidScenario& scenario, std::size_t stage,
                         double x);

double continuation_integral(std::span<const double> values, const BeliefGrid& grid, double p,
                             double rho, const StageQuadrature& quadrature);
double continuation_integral(std::span<const double> values, const BeliefGrid& grid, double p,
                             double rho, const IpidScenario& scenario, std::size_t stage,
                             const QuadratureSpec& spec = {});

struct StageCurves {
    ValueVector stop;      // lambda_l (1 - p)
    ValueVector cont;      // d_l p + A_J(p)
    ValueVector value;     // pointwise min
};

StageCurves stage_bellman_curves(std::span<const double> next, std::size_t stage,
                                 const DetectionCostSpec& costs, const BeliefGrid& grid,
                                 const StageQuadrature& quadrature);
ValueVector stage_bellman(std::span<const double> next, std::size_t stage,
                          const DetectionCostSpec& costs, const BeliefGrid& grid,
                          const StageQuadrature& quadrature);

enum class TieRule {
    Stop,      // stop when lambda (1 - p) <= continuation cost
    Continue,  // stop only when strictly cheaper
};

// Smallest grid point of each stage where stopping is preferred, 1 if none.
std::vector<double> extract_thresholds(const std::vector<StageCurves>& stages,
                                       const BeliefGrid& grid, TieRule rule = TieRule::Stop);

// True when the stop set of the curves is {p >= A} on the grid.
bool stopping_set_is_upper_interval(const StageCurves& curves, TieRule rule = TieRule::Stop);

struct DetectionSolveOptions {
    std::size_t grid_points = 100;
    double tol = 1e-8;
    std::size_t max_cycles = 100000;
    QuadratureSpec quadrature;
    bool record_iterates = false;  // keep J_1, J_2, ... in the solution
};

struct DetectionSolution {
    BeliefGrid grid{2};
    std::vector<StageCurves> stages;       // curves built from the converged J*
    ValueVector optimal_cost;              // J* on the grid (stage-0 entry)
    std::vector<double> thresholds;        // stop-on-tie
    std::vector<double> strict_thresholds; // continue-on-tie
    double cost_at_zero = 0.0;             // J*(0)
    std::vector<double> l2_history;
    std::vector<double> sup_history;
    std::vector<ValueVector> iterates;     // J_k, k = 1.., when recorded
    std::size_t cycles = 0;
    bool converged = false;
    bool monotone = true;
    double residual = 0.0;                 // ||Psi(J*) - J*||_inf
};

DetectionSolution solve_detection(const IpidScenario& scenario, const DetectionCostSpec& costs,
                                  const DetectionSolveOptions& options = {});

// Structural checks: cap, zero at p = 1, nonnegativity, discrete concavity,
// upper-interval stop sets, monotone iterates and residual. Empty when clean.
std::vector<std::string> check_solution_invariants(const DetectionSolution& solution,
                                                   const DetectionCostSpec& costs,
                                                   double tol, double concavity_tol = 1e-6);

// The gridded problem as a finite periodic MDP: states are the grid points
// plus an absorbing "stopped" state (last index); action 0 stops, action 1
// continues. Continuation rows are the interpolation weights of the
// quadrature nodes, renormalised to sum to one.
PeriodicMdp compile_grid_mdp(const IpidScenario& scenario, const DetectionCostSpec& costs,
                             const BeliefGrid& grid, const QuadratureSpec& spec = {});

}  // namespace ipid

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ipid/common.hpp"
#include "ipid/belief.hpp"
#include "ipid/detection_dp.hpp"

#include "oracles.hpp"

using namespace ipid;
using oracle::classical_shiryaev;

namespace {

IpidScenario t2_scenario() { return IpidScenario::gaussian({0, 0}, {1, 1}, {2, 1}, {1, 1}); }

}  // namespace

TEST_SUITE("detection_dp") {

TEST_CASE("belief grid and interpolation") {
    BeliefGrid g(5);
    CHECK(g.size() == 5);
    CHECK(g[0] == 0.0);
    CHECK(g[4] == 1.0);
    CHECK(g.step() == 0.25);
    const std::vector<double> v = {0, 1, 4, 9, 16};
    CHECK(g.interpolate(v, 0.125) == doctest::Approx(0.5));
    CHECK(g.interpolate(v, 1.0) == 16.0);
    CHECK_THROWS_AS(BeliefGrid(1), Error);
}

TEST_CASE("period one equals an independent classical Shiryaev solver") {
    const double cases[][5] = {{0, 1, 1, 1, 10}, {0, 1, 2, 1, 50}, {0, 2, 0.5, 1, 20}};
    for (const auto& c : cases) {
        const auto sc = IpidScenario::gaussian({c[0]}, {c[1] * c[1]}, {c[2]}, {c[3] * c[3]});
        DetectionSolveOptions opts;
        opts.grid_points = 60;
        opts.tol = 1e-13;
        opts.quadrature.nodes = 801;
        const auto sol = solve_detection(sc, DetectionCostSpec::classical(c[4], 0.05), opts);
        REQUIRE(sol.converged);
        const auto oracle = classical_shiryaev(c[0], c[1], c[2], c[3], c[4], 0.05, 60, 801, 1e-13);
        double worst = 0.0;
        for (std::size_t i = 0; i < 60; ++i)
            worst = std::max(worst, std::abs(sol.optimal_cost[i] - oracle[i]));
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("period-two reference scenario") {
    const auto sol = solve_detection(t2_scenario(), DetectionCostSpec{{20, 5}, {10, 1}, 0.01});
    REQUIRE(sol.converged);
    CHECK(sol.cost_at_zero == doctest::Approx(4.95).epsilon(1e-6));
    CHECK(sol.thresholds[0] == doctest::Approx(60.0 / 99.0));
    CHECK(sol.thresholds[1] == 0.0);
    CHECK(check_solution_invariants(sol, DetectionCostSpec{{20, 5}, {10, 1}, 0.01}, 1e-8).empty());
    CHECK(sol.l2_history.size() == sol.cycles);
}

TEST_CASE("structural invariants hold on varied instances") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t T = 1 + trial % 3;
        std::vector<double> pm(T, 0), pv(T, 1), gm(T), gv(T), lam(T), d(T);
        for (std::size_t l = 0; l < T; ++l) {
            gm[l] = 0.3 + 2 * u(rng);
            gv[l] = 0.5 + u(rng);
            lam[l] = 2 + 30 * u(rng);
            d[l] = 0.2 + 5 * u(rng);
        }
        const auto sc = IpidScenario::gaussian(pm, pv, gm, gv);
        const DetectionCostSpec costs{lam, d, 0.01 + 0.1 * u(rng)};
        DetectionSolveOptions opts;
        opts.grid_points = 50;
        opts.quadrature.nodes = 601;
        const auto sol = solve_detection(sc, costs, opts);
        REQUIRE(sol.converged);
        const auto issues = check_solution_invariants(sol, costs, opts.tol);
        for (const auto& msg : issues) MESSAGE(msg);
        CHECK(issues.empty());
    }
}

TEST_CASE("iterates increase monotonically from zero") {
    DetectionSolveOptions opts;
    opts.record_iterates = true;
    const auto sol = solve_detection(t2_scenario(), DetectionCostSpec{{20, 5}, {1, 1}, 0.01}, opts);
    REQUIRE(sol.iterates.size() == sol.cycles);
    for (std::size_t k = 1; k < sol.iterates.size(); ++k)
        for (std::size_t i = 0; i < sol.grid.size(); ++i)
            CHECK(sol.iterates[k][i] >= sol.iterates[k - 1][i] - 1e-12);
    CHECK(sol.residual <= opts.tol);
}

TEST_CASE("threshold grows with the false-alarm penalty") {
    const auto sc = IpidScenario::gaussian({0}, {1}, {1}, {1});
    double prev = -1.0;
    for (double lambda : {2.0, 5.0, 20.0, 100.0}) {
        const auto sol = solve_detection(sc, DetectionCostSpec::classical(lambda, 0.01));
        CHECK(sol.thresholds[0] >= prev);
        prev = sol.thresholds[0];
    }
    CHECK(prev > 0.9);
}

TEST_CASE("belief transition matches the belief recursion") {
    const auto sc = IpidScenario::gaussian({0, 0.5}, {1, 2}, {2, 1}, {1, 1});
    const auto prior = ChangePrior::geometric(0.03);
    for (double p : {0.0, 0.2, 0.7}) {
        for (double y : {-1.0, 0.4, 2.5}) {
            for (std::size_t stage = 0; stage < 2; ++stage) {
                const BeliefState b = update_belief({p, static_cast<std::int64_t>(stage)}, prior, sc, y);
                CHECK(belief_transition(p, 0.03, sc, stage, y) == doctest::Approx(b.p).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("continuation integral of constants and at certainty") {
    const auto sc = t2_scenario();
    const BeliefGrid grid(40);
    const StageQuadrature q(sc, 1, {});
    const std::vector<double> ones(40, 3.0);
    for (double p : {0.0, 0.5, 1.0})
        CHECK(continuation_integral(ones, grid, p, 0.01, q) == doctest::Approx(3.0).epsilon(1e-9));
    std::vector<double> ramp(40);
    for (std::size_t i = 0; i < 40; ++i) ramp[i] = grid[i];
    // E[p_{n+1}] = p~ for the linear function.
    CHECK(continuation_integral(ramp, grid, 0.3, 0.01, q) ==
          doctest::Approx(0.3 + 0.7 * 0.01).epsilon(1e-6));
}

TEST_CASE("quadrature window must cover the stage means") {
    const auto sc = t2_scenario();
    QuadratureSpec spec;
    spec.window = std::make_pair(-3.0, 1.5);
    CHECK_NOTHROW(StageQuadrature(sc, 1, spec));
    try {
        StageQuadrature bad(sc, 0, spec);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("post-change mean 2") != std::string::npos);
    }
    spec.nodes = 1600;
    spec.window.reset();
    CHECK_THROWS_AS(StageQuadrature(sc, 0, spec), Error);
}

TEST_CASE("cost validation") {
    const auto sc = t2_scenario();
    CHECK_THROWS_AS(solve_detection(sc, DetectionCostSpec{{20}, {10, 1}, 0.01}), Error);
    CHECK_THROWS_AS(solve_detection(sc, DetectionCostSpec{{20, 0}, {10, 1}, 0.01}), Error);
    CHECK_THROWS_AS(solve_detection(sc, DetectionCostSpec{{20, 5}, {10, -1}, 0.01}), Error);
    CHECK_THROWS_AS(solve_detection(sc, DetectionCostSpec{{20, 5}, {10, 1}, 0.0}), Error);
}

TEST_CASE("tie rule and upper-interval check") {
    StageCurves c;
    c.stop = {3, 2, 1, 0};
    c.cont = {1, 2, 2, 0};
    const BeliefGrid grid(4);
    CHECK(extract_thresholds({c}, grid, TieRule::Stop)[0] == doctest::Approx(1.0 / 3));
    CHECK(extract_thresholds({c}, grid, TieRule::Continue)[0] == doctest::Approx(2.0 / 3));
    CHECK(stopping_set_is_upper_interval(c));
    c.cont = {4, 2, 0.5, 0};
    CHECK_FALSE(stopping_set_is_upper_interval(c));
    c.cont = {2, 1, 0, -1};  // continuing always strictly cheaper
    CHECK(extract_thresholds({c}, grid)[0] == 1.0);
}

TEST_CASE("compiled grid MDP reproduces the DP") {
    const auto sc = t2_scenario();
    const DetectionCostSpec costs{{20, 5}, {1, 1}, 0.01};
    DetectionSolveOptions opts;
    opts.grid_points = 40;
    opts.quadrature.nodes = 801;
    opts.tol = 1e-11;
    const auto sol = solve_detection(sc, costs, opts);
    const PeriodicMdp mdp = compile_grid_mdp(sc, costs, sol.grid, opts.quadrature);
    const StageValues v = value_iterate(mdp, {1e-11, 100000});
    REQUIRE(v.converged);
    for (std::size_t i = 0; i < 40; ++i)
        CHECK(v.value[i] == doctest::Approx(sol.optimal_cost[i]).epsilon(1e-6));
    CHECK(v.value[40] == 0.0);
    // Stop (action 0) exactly where the DP stops.
    const PeriodicPolicy policy = extract_periodic_policy(v, mdp);
    for (std::size_t l = 0; l < 2; ++l) {
        std::size_t first = 40;
        for (std::size_t i = 0; i < 40; ++i)
            if (policy.maps[l][i] == 0) {
                first = i;
                break;
            }
        CHECK(first < 40);
        CHECK(sol.grid[first] == doctest::Approx(sol.thresholds[l]));
    }
}

}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "ipid/common.hpp"
#include "ipid/belief.hpp"

#include "oracles.hpp"

using namespace ipid;
using oracle::direct_posterior;

TEST_SUITE("belief") {

TEST_CASE("log-odds conversions") {
    CHECK(to_log_odds(0.0) == -INFINITY);
    CHECK(to_log_odds(1.0) == INFINITY);
    CHECK(from_log_odds(-INFINITY) == 0.0);
    CHECK(from_log_odds(INFINITY) == 1.0);
    for (double p : {1e-12, 0.01, 0.3, 0.5, 0.9, 1 - 1e-9})
        CHECK(from_log_odds(to_log_odds(p)) == doctest::Approx(p).epsilon(1e-12));
    CHECK(from_log_odds(800.0) == 1.0);
    CHECK(from_log_odds(-800.0) >= 0.0);
}

TEST_CASE("recursion agrees with the direct mixture posterior") {
    const auto sc = IpidScenario::gaussian({0, 0.3, -0.2}, {1, 1.5, 1}, {1.5, 0.8, 0.1}, {1, 1, 2});
    const double rho = 0.05;
    const auto prior = ChangePrior::geometric(rho);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const SamplePath path = sample_path(sc, prior, 30, 99, s);
        BeliefState b;
        std::vector<double> seen;
        for (double y : path.observations) {
            b = update_belief(b, prior, sc, y);
            seen.push_back(y);
            const double want = direct_posterior(sc, rho, seen);
            CHECK(b.p == doctest::Approx(want).epsilon(1e-10));
            CHECK(b.n == static_cast<std::int64_t>(seen.size()));
        }
    }
}

TEST_CASE("general-prior odds recursion matches the geometric one") {
    const auto sc = IpidScenario::gaussian({0, 0}, {1, 1}, {2, 1}, {1, 1});
    const double rho = 0.01;
    std::vector<double> masses;
    for (int k = 1; k <= 5000; ++k) masses.push_back(rho * std::pow(1 - rho, k - 1));
    const auto table = ChangePrior::explicit_masses(masses);
    const auto geo = ChangePrior::geometric(rho);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const SamplePath path = sample_path(sc, geo, 300, 2024, s);
        OddsState a, b;
        for (double y : path.observations) {
            a = update_odds_general(a, table, sc, y);
            b = update_odds_geometric(b, rho, sc, y);
            const double pa = from_log_odds(a.log_r), pb = from_log_odds(b.log_r);
            worst = std::max(worst, std::abs(pa - pb));
        }
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("first step from zero belief") {
    const auto sc = IpidScenario::gaussian({0}, {1}, {1}, {1});
    const double rho = 0.2;
    const double y = 0.7;
    const double lr = std::exp(y - 0.5);
    const double want = rho * lr / (rho * lr + (1 - rho));
    const auto b = update_belief({}, ChangePrior::geometric(rho), sc, y);
    CHECK(b.p == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("certain change is absorbing") {
    const auto sc = IpidScenario::gaussian({0}, {1}, {1}, {1});
    CHECK(advance_log_odds(INFINITY, 0.01, sc, 0, -50.0) == INFINITY);
}

TEST_CASE("extreme observations stay finite in log odds") {
    const auto sc = IpidScenario::gaussian({0}, {1}, {3}, {1});
    double r = -INFINITY;
    for (int i = 0; i < 2000; ++i) r = advance_log_odds(r, 0.01, sc, 0, -10.0);
    CHECK(std::isfinite(r));
    CHECK(from_log_odds(r) < 1e-10);
    for (int i = 0; i < 2000; ++i) r = advance_log_odds(r, 0.01, sc, 0, 10.0);
    CHECK(from_log_odds(r) == doctest::Approx(1.0));
}

TEST_CASE("bad observations and exhausted priors throw") {
    const auto sc = IpidScenario::gaussian({0}, {1}, {1}, {1});
    CHECK_THROWS_AS(advance_log_odds(0.0, 0.01, sc, 0, NAN), Error);
    CHECK_THROWS_AS(update_belief({}, ChangePrior::explicit_masses({0.5, 0.5}), sc, 0.0), Error);
    auto prior = ChangePrior::explicit_masses({0.5, 0.5});
    // P(nu > 2) = 0: the odds are undefined from n = 2 on.
    OddsState s = update_odds_general({}, prior, sc, 0.1);
    CHECK(std::isfinite(s.log_r));
    CHECK_THROWS_AS(update_odds_general(s, prior, sc, 0.1), Error);
}

TEST_CASE("degenerate laws give the deterministic prior path") {
    const auto sc = IpidScenario::gaussian({0, 0}, {1, 1}, {0, 0}, {1, 1});
    const double rho = 0.1;
    BeliefState b;
    for (int n = 1; n <= 25; ++n) {
        b = update_belief(b, ChangePrior::geometric(rho), sc, 0.3 * n);
        CHECK(b.p == doctest::Approx(1 - std::pow(1 - rho, n)).epsilon(1e-12));
    }
}

}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ipid/common.hpp"
#include "ipid/model.hpp"

using namespace ipid;

namespace {

double gaussian_pdf(double x, double m, double v) {
    return std::exp(-(x - m) * (x - m) / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("stage index wraps with the period") {
    CHECK(stage_of(1, 2) == 1);
    CHECK(stage_of(2, 2) == 2);
    CHECK(stage_of(3, 2) == 1);
    CHECK(stage_index(7, 4) == 2);
    CHECK(stage_index(4, 4) == 3);
    CHECK(stage_of(5, 1) == 1);
}

TEST_CASE("log-likelihood ratio matches the Gaussian density ratio") {
    const auto sc = IpidScenario::gaussian({0, 0.5}, {1, 2}, {2, -1}, {1, 0.5});
    for (double y : {-3.0, -0.2, 0.0, 1.7, 4.5}) {
        const double want1 = std::log(gaussian_pdf(y, 2, 1) / gaussian_pdf(y, 0, 1));
        const double want2 = std::log(gaussian_pdf(y, -1, 0.5) / gaussian_pdf(y, 0.5, 2));
        CHECK(log_likelihood_ratio(sc, 1, y) == doctest::Approx(want1).epsilon(1e-12));
        CHECK(log_likelihood_ratio(sc, 2, y) == doctest::Approx(want2).epsilon(1e-12));
        CHECK(log_likelihood_ratio(sc, 3, y) == doctest::Approx(want1).epsilon(1e-12));
    }
}

TEST_CASE("Gaussian KL closed form agrees with quadrature") {
    const double cases[][4] = {{0.75, 1, 0, 1}, {2, 1, 0, 1}, {1, 0.5, 0, 2}, {-1, 3, 0.5, 1}};
    for (const auto& c : cases) {
        const auto g = StageDensity::gaussian(c[0], c[1]);
        const auto f = StageDensity::gaussian(c[2], c[3]);
        CHECK(kl_divergence(g, f) == doctest::Approx(kl_divergence_quadrature(g, f)).epsilon(1e-8));
    }
    CHECK(kl_divergence(StageDensity::gaussian(0.75, 1), StageDensity::gaussian(0, 1)) ==
          doctest::Approx(0.28125));
}

TEST_CASE("information number averages stage divergences") {
    const auto sc = IpidScenario::gaussian({0, 0}, {1, 1}, {0.75, 0.25}, {1, 1});
    CHECK(kl_information(sc) == doctest::Approx(0.15625).epsilon(1e-14));
    const auto flat = IpidScenario::gaussian({0, 0}, {1, 1}, {0, 0}, {1, 1});
    CHECK(flat.is_degenerate());
    CHECK_THROWS_AS(kl_information(flat), Error);
}

TEST_CASE("geometric prior tail exponent") {
    const auto prior = ChangePrior::geometric(0.01);
    const TailExponent d = prior_tail_exponent(prior);
    CHECK(d.value == doctest::Approx(0.01005033585350145).epsilon(1e-12));
    CHECK_FALSE(d.truncated_estimate);
}

TEST_CASE("explicit prior: tails and tail exponent estimate") {
    std::vector<double> masses;
    for (int k = 1; k <= 200; ++k) masses.push_back(0.05 * std::pow(0.95, k - 1));
    const auto prior = ChangePrior::explicit_masses(masses);
    CHECK(prior.tail(0) == doctest::Approx(1.0));
    CHECK(prior.tail(10) == doctest::Approx(std::pow(0.95, 10)).epsilon(1e-10));
    const TailExponent d = prior_tail_exponent(prior);
    CHECK(d.truncated_estimate);
    CHECK(d.value == doctest::Approx(-std::log(0.95)).epsilon(1e-6));
    CHECK_THROWS_AS(ChangePrior::explicit_masses({0.5, -0.1}), Error);
}

TEST_CASE("geometric change point has mean 1 / rho") {
    const double rho = 0.05;
    const auto prior = ChangePrior::geometric(rho);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    RandomSource rng(11, 0);
    for (int i = 0; i < n; ++i) {
        const auto nu = prior.sample(rng, 1'000'000);
        REQUIRE(nu.has_value());
        REQUIRE(*nu >= 1);
        sum += static_cast<double>(*nu);
        sq += static_cast<double>(*nu) * static_cast<double>(*nu);
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.0 / rho) < 4 * se);
}

TEST_CASE("change points beyond the horizon are reported as absent") {
    const auto prior = ChangePrior::geometric(0.5);
    RandomSource rng(3, 0);
    int absent = 0;
    for (int i = 0; i < 20000; ++i)
        if (!prior.sample(rng, 2)) ++absent;
    // P(nu > 2) = 0.25
    CHECK(absent / 20000.0 == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("path stream reproduces sample_path exactly") {
    const auto sc = IpidScenario::gaussian({0, 0}, {1, 1}, {2, 1}, {1, 1});
    const auto prior = ChangePrior::geometric(0.1);
    const SamplePath path = sample_path(sc, prior, 60, 42, 7);
    PathStream stream(sc, prior, 60, 42, 7);
    CHECK(stream.change_point() == path.change_point);
    for (double y : path.observations) CHECK(stream.next() == y);
    CHECK(stream.exhausted());
    const SamplePath again = sample_path(sc, prior, 60, 42, 7);
    CHECK(again.observations == path.observations);
    const SamplePath other = sample_path(sc, prior, 60, 42, 8);
    CHECK(other.observations != path.observations);
}

TEST_CASE("post-change observations follow the post-change laws") {
    const auto sc = IpidScenario::gaussian({0, 0}, {1, 1}, {3, -3}, {1, 1});
    const auto prior = ChangePrior::geometric(0.2);
    double pre = 0, post_odd = 0, post_even = 0;
    int npre = 0, nodd = 0, neven = 0;
    for (std::uint64_t s = 0; s < 2000; ++s) {
        const SamplePath p = sample_path(sc, prior, 40, 5, s);
        const std::int64_t nu = p.change_point.value_or(1000);
        for (std::int64_t n = 1; n <= 40; ++n) {
            const double y = p.observations[n - 1];
            if (n < nu) {
                pre += y;
                ++npre;
            } else if (n % 2 == 1) {
                post_odd += y;
                ++nodd;
            } else {
                post_even += y;
                ++neven;
            }
        }
    }
    CHECK(std::abs(pre / npre) < 0.05);
    CHECK(post_odd / nodd == doctest::Approx(3.0).epsilon(0.02));
    CHECK(post_even / neven == doctest::Approx(-3.0).epsilon(0.02));
}

TEST_CASE("invalid scenarios and priors are rejected") {
    CHECK_THROWS_AS(StageDensity::gaussian(0, 0), Error);
    CHECK_THROWS_AS(IpidScenario::gaussian({0, 0}, {1, 1}, {1}, {1}), Error);
    CHECK_THROWS_AS(ChangePrior::geometric(0.0), Error);
    CHECK_THROWS_AS(ChangePrior::geometric(1.0), Error);
}

}

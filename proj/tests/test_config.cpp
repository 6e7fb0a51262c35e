#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "ipid/common.hpp"
#include "ipid/config.hpp"
#include "ipid/experiments.hpp"
#include "ipid/mdp_io.hpp"

using namespace ipid;

namespace {

const std::string kBase =
    "period = 2\n"
    "pre_mean = 0, 0\n"
    "post_mean = 2, 1\n"
    "lambda = 20, 5\n"
    "delay = 10, 1\n";

std::string parse_error(const std::string& text) {
    std::istringstream in(text);
    try {
        parse_config(in, "cfg");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
        return e.what();
    }
    return "no error";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal config with defaults") {
    std::istringstream in(kBase);
    const ExperimentConfig c = parse_config(in, "cfg");
    CHECK(c.period == 2);
    CHECK(c.pre_var == std::vector<double>{1, 1});
    CHECK(c.rho == 0.01);
    CHECK(c.grid == 100);
    CHECK(c.paths == 10000);
    CHECK(c.alignment == CostAlignment::Lagged);
    CHECK_FALSE(c.thresholds.has_value());
    CHECK(c.scenario().post(1).mean() == 1.0);
    CHECK(c.costs().false_alarm == std::vector<double>{20, 5});
}

TEST_CASE("comments, spacing and lists") {
    std::istringstream in("# header\n" + kBase +
                          "  rho=0.02   # inline\n\nalphas = 1e-2 1e-3,1e-4\nalignment = aligned\n");
    const ExperimentConfig c = parse_config(in, "cfg");
    CHECK(c.rho == 0.02);
    CHECK(c.alphas == std::vector<double>{1e-2, 1e-3, 1e-4});
    CHECK(c.alignment == CostAlignment::Aligned);
}

TEST_CASE("sweep grid is independent of the period") {
    std::istringstream in(kBase + "sweep_grid = 0, 0.01, 0.02, 0.5, 1\n");
    const ExperimentConfig c = parse_config(in, "cfg");
    REQUIRE(c.sweep_grid.has_value());
    CHECK(c.sweep_grid->size() == 5);
    CHECK(parse_error(kBase + "sweep_grid = 0.1, 1.2\n").find("cfg:6: field 'sweep_grid'") == 0);
}

TEST_CASE("errors name the line and the field") {
    CHECK(parse_error(kBase + "lambda = 1\n").find("cfg:6: field 'lambda': repeated") == 0);
    CHECK(parse_error("period = 2\npre_mean = 0, 0\npost_mean = 2, 1\nlambda = 20, 5, 1\ndelay = 1, 1\n")
              .find("cfg:4: field 'lambda': expected 2 values") == 0);
    CHECK(parse_error(kBase + "rho = 1.5\n").find("cfg:6: field 'rho'") == 0);
    CHECK(parse_error(kBase + "speed = 3\n").find("cfg:6: field 'speed': unknown field") == 0);
    CHECK(parse_error(kBase + "grid = ten\n").find("cfg:6: field 'grid'") == 0);
    CHECK(parse_error(kBase + "pre_var = 1, 0\n").find("cfg:6: field 'pre_var'") == 0);
    CHECK(parse_error(kBase + "thresholds = 0.5, 0.2, 0.1\n").find("field 'thresholds'") != std::string::npos);
    CHECK(parse_error(kBase + "alignment = late\n").find("cfg:6: field 'alignment'") == 0);
    CHECK(parse_error(kBase + "just words\n").find("cfg:6: expected 'key = value'") == 0);
    CHECK(parse_error("pre_mean = 0\n").find("field 'period': missing required field") != std::string::npos);
    CHECK(parse_error(kBase + "delay2 = 1\n").find("unknown field") != std::string::npos);
}

TEST_CASE("bundled configs load") {
    const std::filesystem::path dir = IPID_CONFIG_DIR;
    std::size_t n = 0;
    for (Target t : {Target::Table1, Target::Table2, Target::Table3, Target::Fig1, Target::Fig2,
                     Target::Fig3}) {
        for (const std::string& file : target_configs(t)) {
            CAPTURE(file);
            const ExperimentConfig c = load_config((dir / file).string());
            CHECK_FALSE(c.label.empty());
            CHECK(c.lambda.size() == c.period);
            ++n;
        }
    }
    CHECK(n == 15);
    CHECK_THROWS_AS(load_config((dir / "missing.cfg").string()), Error);
}

TEST_CASE("bundled MDP instance matches the finite-horizon oracle") {
    const PeriodicMdp mdp = load_mdp_instance(std::string(IPID_CONFIG_DIR) + "/mdp_3state_t2.txt");
    const StageValues v = value_iterate(mdp, {1e-12, 100000});
    const ValueVector oracle = finite_horizon_oracle(mdp, 400);
    const double bound = std::pow(0.9, 400) * mdp.max_cost() / 0.1 + 1e-10;
    for (std::size_t s = 0; s < 3; ++s) CHECK(std::abs(v.value[s] - oracle[s]) <= bound);
}

}

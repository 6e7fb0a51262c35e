#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ipid/common.hpp"
#include "ipid/config.hpp"
#include "ipid/csv.hpp"
#include "ipid/experiments.hpp"
#include "ipid/kernels.hpp"

using namespace ipid;
namespace fs = std::filesystem;

namespace {

// Compares against tests/golden/<name>; IPID_UPDATE_GOLDEN=1 rewrites it.
void check_golden(const std::string& name, const std::string& actual) {
    const fs::path path = fs::path(IPID_GOLDEN_DIR) / name;
    const char* update = std::getenv("IPID_UPDATE_GOLDEN");
    if (update != nullptr && std::string(update) == "1") {
        std::ofstream(path) << actual;
        MESSAGE("updated " << path.string());
        return;
    }
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), "missing golden file " << path.string());
    std::stringstream expected;
    expected << in.rdbuf();
    CHECK_MESSAGE(expected.str() == actual, "golden mismatch: " << name);
}

ExperimentConfig bundled(const std::string& file) {
    return load_config(std::string(IPID_CONFIG_DIR) + "/" + file);
}

struct ScalarKernels {
    ScalarKernels() { kernels::force_isa(kernels::Isa::Scalar); }
    ~ScalarKernels() { kernels::force_isa(std::nullopt); }
};

}  // namespace

TEST_SUITE("golden") {

TEST_CASE("value curves and thresholds of the period-two scenario") {
    ScalarKernels scalar;
    const ExperimentConfig c = bundled("t2_baseline.cfg");
    const DetectionSolution sol = solve_detection(c.scenario(), c.costs(), c.solve_options());
    std::ostringstream curves, thr, hist;
    csv::value_curves(curves, sol);
    csv::thresholds(thr, sol);
    csv::history(hist, sol);
    check_golden("t2_value_curves.csv", curves.str());
    check_golden("t2_thresholds.csv", thr.str());
    check_golden("t2_l2_history.csv", hist.str());
}

TEST_CASE("single-threshold sweep") {
    ExperimentConfig c = bundled("t2_baseline.cfg");
    c.paths = 500;
    const SweepResult s =
        sweep_single_threshold(c.scenario(), c.costs(), default_threshold_grid(), c.simulation_options());
    std::ostringstream out;
    csv::sweep(out, s);
    check_golden("t2_sweep_500.csv", out.str());
}

TEST_CASE("tradeoff curve") {
    ExperimentConfig c = bundled("fig3_tradeoff.cfg");
    c.paths = 300;
    std::ostringstream out;
    csv::tradeoff(out, run_tradeoff(c));
    check_golden("fig3_tradeoff_300.csv", out.str());
}

}

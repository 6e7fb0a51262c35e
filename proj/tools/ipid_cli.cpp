// Experiment runner: solve, simulate, sweep, tradeoff, reproduce, mdp-solve.
//
// Exit codes: 0 success, 1 usage, 2 parse error, 3 value iteration did not
// converge, 4 any other runtime failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ipid/config.hpp"
#include "ipid/csv.hpp"
#include "ipid/experiments.hpp"
#include "ipid/mdp_io.hpp"
#include "ipid/monte_carlo.hpp"

#ifndef IPID_DEFAULT_CONFIG_DIR
#define IPID_DEFAULT_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;
using namespace ipid;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitRuntime = 4;

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<std::size_t> grid;
    std::optional<double> tol;
    std::string out_dir;
    std::string policy = "optimal";
    std::vector<double> alphas;
    std::vector<double> sweep_grid;
    std::string config_dir = IPID_DEFAULT_CONFIG_DIR;
    std::string target;
    std::string instance;
};

ExperimentConfig apply(ExperimentConfig c, const Overrides& o) {
    if (o.seed) c.seed = *o.seed;
    if (o.paths) c.paths = *o.paths;
    if (o.grid) c.grid = *o.grid;
    if (o.tol) c.tol = *o.tol;
    if (!o.out_dir.empty()) c.output_dir = o.out_dir;
    if (!o.alphas.empty()) c.alphas = o.alphas;
    require(c.paths >= 1, "--paths must be >= 1");
    require(c.grid >= 2, "--grid must be >= 2");
    require(c.tol > 0.0, "--tol must be > 0");
    for (double a : c.alphas) require(a > 0.0 && a < 1.0, "--alpha values must lie in (0, 1)");
    return c;
}

ExperimentConfig load(const Overrides& o) { return apply(load_config(o.config), o); }

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    fn(out);
    if (!out) throw std::runtime_error("write failed: " + path.string());
    std::cout << "  wrote " << path.string() << '\n';
}

std::string list(const std::vector<double>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + csv::num(v[i]);
    return s + ")";
}

DetectionSolution solve_and_report(const ExperimentConfig& c, bool record_iterates) {
    DetectionSolveOptions options = c.solve_options();
    options.record_iterates = record_iterates;
    DetectionSolution sol = solve_detection(c.scenario(), c.costs(), options);
    std::printf("%s: J*(0) = %.4f, thresholds %s, %zu cycles, residual %.2e%s\n",
                c.name.c_str(), sol.cost_at_zero, list(sol.thresholds).c_str(), sol.cycles,
                sol.residual, sol.converged ? "" : " (NOT CONVERGED)");
    return sol;
}

void write_solution(const fs::path& dir, const DetectionSolution& sol) {
    write_file(dir / "value_curves.csv", [&](std::ostream& o) { csv::value_curves(o, sol); });
    write_file(dir / "l2_history.csv", [&](std::ostream& o) { csv::history(o, sol); });
    write_file(dir / "thresholds.csv", [&](std::ostream& o) { csv::thresholds(o, sol); });
    if (!sol.iterates.empty())
        write_file(dir / "iterates.csv", [&](std::ostream& o) { csv::iterates(o, sol); });
}

int cmd_solve(const Overrides& o) {
    const ExperimentConfig c = load(o);
    const DetectionSolution sol = solve_and_report(c, true);
    write_solution(c.output_dir, sol);
    return sol.converged ? kExitOk : kExitNotConverged;
}

StoppingPolicy parse_policy(const std::string& text, std::size_t period) {
    std::string s = text;
    for (char& ch : s)
        if (ch == ',') ch = ' ';
    std::istringstream in(s);
    std::vector<double> v;
    double x = 0.0;
    while (in >> x) v.push_back(x);
    if (!in.eof() || v.empty())
        throw CLI::ValidationError("--policy", "expected 'optimal' or thresholds, got '" + text + "'");
    if (v.size() == 1) return StoppingPolicy::single(v[0]);
    if (v.size() != period)
        throw CLI::ValidationError("--policy", "expected 1 or " + std::to_string(period) +
                                                   " thresholds, got " + std::to_string(v.size()));
    return StoppingPolicy::periodic(v);
}

int cmd_simulate(const Overrides& o) {
    const ExperimentConfig c = load(o);
    std::string spec = o.policy;
    if (spec == "optimal" && c.thresholds) {
        spec.clear();
        for (double a : *c.thresholds) spec += csv::num(a) + ",";
        spec.pop_back();
    }
    StoppingPolicy policy = StoppingPolicy::single(0.0);
    std::optional<DetectionSolution> sol;
    if (spec == "optimal") {
        sol = solve_and_report(c, false);
        if (!sol->converged) return kExitNotConverged;
        policy = StoppingPolicy::periodic(sol->thresholds);
    } else {
        policy = parse_policy(spec, c.period);
    }
    const SimulationReport r =
        estimate_bayes_cost(c.scenario(), c.costs(), policy, c.simulation_options());
    std::printf("%s: %s cost %.4f +- %.4f (%zu paths, seed %llu, %s costs, censored %.4f)\n",
                c.name.c_str(), policy.describe().c_str(), r.estimate, r.standard_error, r.paths,
                static_cast<unsigned long long>(r.seed), alignment_name(c.alignment),
                r.censored_fraction);
    write_file(fs::path(c.output_dir) / "simulation.csv", [&](std::ostream& out) {
        csv::reports(out, {policy.describe()}, {r}, c.alignment);
    });
    return kExitOk;
}

int cmd_sweep(const Overrides& o) {
    const ExperimentConfig c = load(o);
    std::vector<double> grid = c.sweep_grid ? *c.sweep_grid : default_threshold_grid();
    if (!o.sweep_grid.empty()) grid = o.sweep_grid;
    for (double a : grid)
        if (!(a >= 0.0 && a <= 1.0))
            throw CLI::ValidationError("--thresholds", "thresholds must lie in [0, 1]");
    const SweepResult s = sweep_single_threshold(c.scenario(), c.costs(), grid, c.simulation_options());
    std::printf("%s: best single threshold A = %s, cost %.4f +- %.4f\n", c.name.c_str(),
                csv::num(s.best_point().threshold).c_str(), s.best_point().report.estimate,
                s.best_point().report.standard_error);
    write_file(fs::path(c.output_dir) / "sweep.csv", [&](std::ostream& out) { csv::sweep(out, s); });
    return kExitOk;
}

void run_trace(const ExperimentConfig& c, const fs::path& dir) {
    const double alpha = c.alphas.front();
    const std::int64_t horizon = resolve_horizon(c.simulation_options(), c.rho);
    const auto t = trace_path(c.scenario(), c.rho, StoppingPolicy::single(1.0 - alpha), horizon,
                              c.seed, 0);
    write_file(dir / "trace.csv", [&](std::ostream& out) { csv::trace(out, t); });
}

int cmd_tradeoff(const Overrides& o) {
    const ExperimentConfig c = load(o);
    const TradeoffResult t = run_tradeoff(c);
    std::printf("%s: I = %.5f, d = %.7f\n", c.name.c_str(), t.information, t.tail_exponent);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const TradeoffRow& r = t.rows[i];
        std::printf("  alpha %-8s ADD %.2f +- %.2f  cond %.2f  PFA %.5f  analytic %.2f%s\n",
                    csv::num(r.alpha).c_str(), r.sim.add.estimate, r.sim.add.standard_error,
                    r.sim.conditional_add.estimate, r.sim.pfa.estimate, r.analytic,
                    t.bound[i].below_slack ? "  [below bound slack]" : "");
    }
    write_file(fs::path(c.output_dir) / "tradeoff.csv",
               [&](std::ostream& out) { csv::tradeoff(out, t); });
    run_trace(c, c.output_dir);
    return kExitOk;
}

void print_row(const RowResult& r) {
    std::printf("  %-28s single %.2f +- %.2f (A=%s) [published %s]  optimal %.2f +- %.2f, "
                "DP %.2f [published %s]\n",
                r.config.label.c_str(), r.single().estimate, r.single().standard_error,
                csv::num(r.best_threshold()).c_str(), csv::num(r.config.published_single).c_str(),
                r.optimal.estimate, r.optimal.standard_error, r.solution.cost_at_zero,
                csv::num(r.config.published_optimal).c_str());
}

int cmd_reproduce(const Overrides& o) {
    const Target target = parse_target(o.target);
    const fs::path out_dir = o.out_dir.empty() ? fs::path("out") / target_name(target) : fs::path(o.out_dir);
    Overrides local = o;
    local.out_dir = out_dir.string();

    std::vector<RowResult> rows;
    for (const std::string& file : target_configs(target)) {
        local.config = (fs::path(o.config_dir) / file).string();
        const ExperimentConfig c = load(local);
        if (target == Target::Fig3) return cmd_tradeoff(local);
        rows.push_back(run_row(c));
        print_row(rows.back());
        if (target == Target::Fig1 || target == Target::Fig2) {
            DetectionSolveOptions opts = c.solve_options();
            opts.record_iterates = true;
            const DetectionSolution sol = solve_detection(c.scenario(), c.costs(), opts);
            write_solution(out_dir, sol);
            write_file(out_dir / "sweep.csv",
                       [&](std::ostream& out) { csv::sweep(out, rows.back().sweep); });
        }
    }
    write_file(out_dir / (std::string(target_name(target)) + ".csv"),
               [&](std::ostream& out) { csv::reproduction(out, target, rows); });
    return kExitOk;
}

int cmd_mdp_solve(const Overrides& o) {
    const PeriodicMdp mdp = load_mdp_instance(o.instance);
    ValueIterationOptions options = default_iteration_options(mdp.discount());
    if (o.tol) options.tol = *o.tol;
    const StageValues v = value_iterate(mdp, options);
    const PeriodicPolicy policy = extract_periodic_policy(v, mdp);
    const double residual = fixed_point_residual(v, mdp);
    std::printf("%s: %zu states, %zu actions, period %zu; %zu cycles, residual %.2e%s\n",
                o.instance.c_str(), mdp.states(), mdp.actions(), mdp.period(), v.cycles, residual,
                v.converged ? "" : " (NOT CONVERGED)");
    for (std::size_t l = 0; l < mdp.period(); ++l) {
        std::printf("  stage %zu:", l);
        for (std::size_t s = 0; s < mdp.states(); ++s)
            std::printf(" V=%.6f a=%zu;", v.stage_entry[l][s], policy.maps[l][s]);
        std::printf("\n");
    }
    const fs::path dir = o.out_dir.empty() ? fs::path("out") / "mdp" : fs::path(o.out_dir);
    write_file(dir / "mdp_solution.csv", [&](std::ostream& out) { csv::mdp_solution(out, v, policy); });
    return v.converged ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic change detection: optimal stopping and simulation"};
    app.require_subcommand(1);
    Overrides o;
    std::size_t threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: hardware concurrency)");

    auto common = [&](CLI::App* sub, bool needs_config) {
        auto* cfg = sub->add_option("--config", o.config, "Experiment config file");
        if (needs_config) cfg->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "Random seed");
        sub->add_option("--paths", o.paths, "Monte-Carlo sample paths");
        sub->add_option("--grid", o.grid, "Belief grid points");
        sub->add_option("--tol", o.tol, "Value iteration tolerance");
        sub->add_option("--out-dir", o.out_dir, "Output directory");
    };

    auto* solve = app.add_subcommand("solve", "Solve the detection DP and write value curves");
    common(solve, true);
    auto* simulate = app.add_subcommand("simulate", "Estimate the Bayes cost of a policy");
    common(simulate, true);
    simulate->add_option("--policy", o.policy, "'optimal', a threshold, or one per stage (a,b,...)");
    auto* sweep = app.add_subcommand("sweep", "Bayes cost over a grid of single thresholds");
    common(sweep, true);
    sweep->add_option("--thresholds", o.sweep_grid, "Thresholds to sweep (a,b,...)")->delimiter(',');
    auto* tradeoff = app.add_subcommand("tradeoff", "Delay / false-alarm curve with A = 1 - alpha");
    common(tradeoff, true);
    tradeoff->add_option("--alpha", o.alphas, "False-alarm levels")->delimiter(',');
    auto* reproduce = app.add_subcommand("reproduce", "Rerun a bundled table or figure");
    common(reproduce, false);
    reproduce->add_option("target", o.target, "table1 | table2 | table3 | fig1 | fig2 | fig3")
        ->required();
    reproduce->add_option("--config-dir", o.config_dir, "Directory of bundled configs");
    reproduce->add_option("--alpha", o.alphas, "False-alarm levels (fig3)")->delimiter(',');
    auto* mdp = app.add_subcommand("mdp-solve", "Value iteration on a periodic MDP instance");
    mdp->add_option("instance", o.instance, "Instance file")->required()->check(CLI::ExistingFile);
    mdp->add_option("--tol", o.tol, "Value iteration tolerance");
    mdp->add_option("--out-dir", o.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (threads > 0) set_worker_count(threads);
        if (*solve) return cmd_solve(o);
        if (*simulate) return cmd_simulate(o);
        if (*sweep) return cmd_sweep(o);
        if (*tradeoff) return cmd_tradeoff(o);
        if (*reproduce) return cmd_reproduce(o);
        if (*mdp) return cmd_mdp_solve(o);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.kind()) {
            case ErrorKind::Parse: return kExitParse;
            case ErrorKind::NotConverged: return kExitNotConverged;
            default: return kExitRuntime;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

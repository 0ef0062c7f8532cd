// mfharvest: batch front end for the threshold, mean-field and simulation solvers.
//
// Exit codes: 0 success, 2 malformed input, 3 solver failure, 4 ordering violation.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mfharvest/errors.hpp"
#include "mfharvest/report.hpp"
#include "mfharvest/scenario.hpp"
#include "mfharvest/simulation.hpp"
#include "mfharvest/stationary.hpp"

namespace fs = std::filesystem;
using namespace mfharvest;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitOrdering = 4;

struct Options {
    std::string scenario;
    std::string out = "out";
    std::string report;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<int> grid;
    std::optional<double> dt;
};

Scenario load(const Options& o) {
    Scenario s = load_scenario(o.scenario);
    if (o.tol) {
        if (!(*o.tol > 0.0)) throw ParseError("--tol must be positive");
        s.tolerance.rel = *o.tol;
        s.model = s.model.with_tolerance(s.tolerance);
    }
    if (o.grid) {
        if (*o.grid < 3) throw ParseError("--grid must be at least 3");
        s.meanfield.scan_points = *o.grid;
        s.meanfield.mfc_points = *o.grid;
    }
    if (o.dt) {
        if (!(*o.dt > 0.0)) throw ParseError("--dt must be positive");
        s.sim.dt = *o.dt;
    }
    if (o.seed) {
        s.sim.seed = *o.seed;
        s.sweep.seed = *o.seed;
    }
    return s;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

void emit(const Options& o, const SolveReport& report) {
    fs::create_directories(o.out);
    const std::string table = render_text(report);
    write_file(fs::path(o.out) / "report.json", to_json(report) + "\n");
    write_file(fs::path(o.out) / "table.txt", table);
    std::cout << table;
}

MeanFieldProblem problem_of(const Scenario& s) { return MeanFieldProblem(s.model, s.payoff, s.meanfield); }

int run(const std::string& command, const Options& o) {
    if (command == "render") {
        std::ifstream in(o.report);
        if (!in) throw ParseError("cannot open report '" + o.report + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        std::cout << render_text(report_from_json(buf.str()));
        return 0;
    }

    const Scenario s = load(o);

    if (command == "validate") {
        emit(o, make_validate_report(s.model, validate_assumptions(s.model)));
        return 0;
    }
    if (command == "sweep") {
        const auto rows = run_sweep(s.sweep);
        const SolveReport rep = make_sweep_report(s.sweep, rows);
        emit(o, rep);
        write_file(fs::path(o.out) / "sweep.csv", sweep_csv(rows));
        for (const auto& r : rows)
            if (!r.holds) return kExitOrdering;
        return 0;
    }

    const MeanFieldProblem problem = problem_of(s);
    if (command == "solve-single") {
        emit(o, make_single_report(problem, s.single_z, problem.best_response(s.single_z)));
        return 0;
    }
    if (command == "solve-mfg") {
        const EquilibriumSet set = problem.mfg_equilibrium();
        emit(o, make_mfg_report(problem, set));
        if (set.points.empty()) {
            std::cerr << "error: " << set.diagnostic << '\n';
            return kExitSolver;
        }
        return 0;
    }
    if (command == "solve-mfc") {
        emit(o, make_mfc_report(problem, problem.mfc_optimum()));
        return 0;
    }
    if (command == "compare") {
        const ComparisonReport cmp = problem.compare();
        emit(o, make_compare_report(problem, cmp));
        if (cmp.mfg.points.empty()) {
            std::cerr << "error: " << cmp.mfg.diagnostic << '\n';
            return kExitSolver;
        }
        if (!cmp.holds()) {
            std::cerr << "error: ordering violated, worst margin " << format_number(cmp.worst_margin) << '\n';
            return kExitOrdering;
        }
        return 0;
    }

    // verify and simulate work at the (first) equilibrium unless told otherwise.
    const EquilibriumSet set = problem.mfg_equilibrium();
    if (set.points.empty()) throw ConvergenceError(set.diagnostic);
    const Equilibrium& eq = set.points.front();

    if (command == "verify") {
        const double price = s.payoff.phi(eq.level);
        const double y0 = s.model.y0();
        AuxiliaryProblem aux{[price, y0](double y) { return price * (y - y0); }, {}, {}, s.payoff.K};
        const ThresholdSolution sol = solve_auxiliary(problem.hitting(), aux);
        const VerificationReport v = verify_solution(problem.hitting(), sol, aux);
        emit(o, make_verify_report(problem, sol, v));
        if (!v.passed()) {
            std::cerr << "error: verification failed\n";
            return kExitSolver;
        }
        return 0;
    }
    if (command == "simulate") {
        SimulationSummary sum;
        sum.threshold = s.simulate_threshold.value_or(eq.threshold);
        sum.config = s.sim;
        sum.paths = s.paths;
        sum.hitting_time = estimate_hitting_time(s.model, sum.threshold, s.paths, s.sim);
        sum.xi = problem.hitting().xi(sum.threshold);
        sum.stationary_mean = estimate_stationary_mean(s.model, sum.threshold, s.sim);
        sum.expected_stock = problem.stationary().expected_stock(sum.threshold);
        sum.value = estimate_value(s.model, s.payoff, sum.threshold, std::nullopt, s.sim);
        sum.analytic_value = problem.population_value(sum.threshold);
        emit(o, make_simulation_report(problem, sum));

        const PathRecord path = simulate_path(s.model, sum.threshold, s.path_horizon, s.sim, s.path_stride);
        std::ofstream pc(fs::path(o.out) / "path.csv");
        write_path_csv(pc, path);
        std::ofstream dc(fs::path(o.out) / "density.csv");
        write_density_csv(dc, problem.stationary().density_table(sum.threshold));
        return 0;
    }
    throw ParseError("unknown command " + command);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-run-average impulse control, mean field games and mean field control for 1-D diffusions"};
    app.require_subcommand(1);
    Options o;

    const auto add_common = [&](CLI::App* sub, bool simulation_flags) {
        sub->add_option("--scenario", o.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "Output directory")->capture_default_str();
        sub->add_option("--tol", o.tol, "Relative quadrature tolerance");
        sub->add_option("--grid", o.grid, "Grid points for equilibrium scans and the MFC search");
        if (simulation_flags) {
            sub->add_option("--seed", o.seed, "Master seed");
            sub->add_option("--dt", o.dt, "Euler time step");
        }
    };
    const std::pair<const char*, const char*> commands[] = {
        {"solve-single", "Optimal threshold against a fixed interaction level"},
        {"solve-mfg", "Mean field equilibria with stability labels"},
        {"solve-mfc", "Mean field control optimum"},
        {"compare", "Equilibria vs control optimum and the ordering check"},
        {"simulate", "Monte Carlo cross-check, path.csv and density.csv"},
        {"verify", "Stopping-problem verification of the equilibrium's auxiliary problem"},
        {"sweep", "Randomised logistic ordering sweep, sweep.csv"},
        {"validate", "Assumption probes for the model"},
    };
    for (const auto& [name, help] : commands) {
        const std::string n = name;
        add_common(app.add_subcommand(name, help), n == "simulate" || n == "sweep");
    }
    auto* render = app.add_subcommand("render", "Print the table of an existing report.json");
    render->add_option("--report", o.report, "report.json from an earlier run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitParse;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, o);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kExitSolver;
    }
}

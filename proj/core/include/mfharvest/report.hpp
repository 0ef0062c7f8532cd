#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mfharvest/meanfield.hpp"
#include "mfharvest/simulation.hpp"

namespace mfharvest {

using Cell = std::variant<double, std::string>;

struct ReportTable {
    std::string title;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Everything a CLI run prints. JSON keeps full precision; the text form uses
/// 6 significant digits, so a report re-read from JSON renders identically.
struct SolveReport {
    std::string task;
    std::vector<std::pair<std::string, std::string>> context;
    std::vector<ReportTable> tables;
    std::vector<std::string> notes;
};

std::string to_json(const SolveReport& report);
/// Throws ParseError on malformed input.
SolveReport report_from_json(std::string_view text);
std::string render_text(const SolveReport& report);
/// %.6g, with "inf"/"nan" spelled out.
std::string format_number(double v);

SolveReport make_single_report(const MeanFieldProblem& problem, double z, const ThresholdSolution& sol);
SolveReport make_mfg_report(const MeanFieldProblem& problem, const EquilibriumSet& set);
SolveReport make_mfc_report(const MeanFieldProblem& problem, const MfcSolution& sol);
SolveReport make_compare_report(const MeanFieldProblem& problem, const ComparisonReport& cmp);
SolveReport make_validate_report(const Diffusion& model, const AssumptionReport& rep);
SolveReport make_verify_report(const MeanFieldProblem& problem, const ThresholdSolution& sol,
                               const VerificationReport& rep);

struct SimulationSummary {
    double threshold = 0.0;
    SimConfig config;
    std::int64_t paths = 0;
    Estimate hitting_time;
    double xi = 0.0;
    Estimate stationary_mean;
    double expected_stock = 0.0;
    Estimate value;
    double analytic_value = 0.0;
};
SolveReport make_simulation_report(const MeanFieldProblem& problem, const SimulationSummary& sim);
SolveReport make_sweep_report(const SweepConfig& config, const std::vector<SweepRow>& rows);

/// CSV with one row per draw.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace mfharvest

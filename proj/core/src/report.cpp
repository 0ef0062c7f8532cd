#include "mfharvest/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "mfharvest/errors.hpp"

namespace mfharvest {

using nlohmann::json;

namespace {

json cell_to_json(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) return *d;
        return format_number(*d);  // JSON has no inf/nan
    }
    return std::get<std::string>(c);
}

Cell cell_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    if (j.is_boolean()) return std::string(j.get<bool>() ? "yes" : "no");
    throw ParseError("report cell must be a number or a string");
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string stability_label(const StabilityReport& s) {
    std::string out = s.stable ? "stable" : "unstable";
    if (s.marginal) out += " (marginal)";
    return out;
}

void add_context(SolveReport& r, const MeanFieldProblem& p) {
    r.context.emplace_back("model", p.hitting().model().describe());
    const auto& pay = p.payoff();
    std::ostringstream os;
    os << "K=" << format_number(pay.K) << ", phi(z)=" << pay.phi_text << ", interaction=" << to_string(pay.interaction);
    r.context.emplace_back("payoff", os.str());
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string to_json(const SolveReport& report) {
    json j;
    j["task"] = report.task;
    j["context"] = json::array();
    for (const auto& [k, v] : report.context) j["context"].push_back({{"key", k}, {"value", v}});
    j["tables"] = json::array();
    for (const auto& t : report.tables) {
        json jt{{"title", t.title}, {"columns", t.columns}, {"rows", json::array()}};
        for (const auto& row : t.rows) {
            json jr = json::array();
            for (const auto& c : row) jr.push_back(cell_to_json(c));
            jt["rows"].push_back(jr);
        }
        j["tables"].push_back(jt);
    }
    j["notes"] = report.notes;
    return j.dump(2);
}

SolveReport report_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("report: ") + e.what(), e.byte);
    }
    try {
        SolveReport r;
        r.task = j.at("task").get<std::string>();
        for (const auto& c : j.at("context")) r.context.emplace_back(c.at("key").get<std::string>(), c.at("value").get<std::string>());
        for (const auto& jt : j.at("tables")) {
            ReportTable t;
            t.title = jt.at("title").get<std::string>();
            t.columns = jt.at("columns").get<std::vector<std::string>>();
            for (const auto& jr : jt.at("rows")) {
                std::vector<Cell> row;
                for (const auto& c : jr) row.push_back(cell_from_json(c));
                t.rows.push_back(std::move(row));
            }
            r.tables.push_back(std::move(t));
        }
        if (j.contains("notes")) r.notes = j.at("notes").get<std::vector<std::string>>();
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("report: ") + e.what());
    }
}

std::string render_text(const SolveReport& report) {
    std::ostringstream os;
    os << "task: " << report.task << '\n';
    for (const auto& [k, v] : report.context) os << k << ": " << v << '\n';
    for (const auto& t : report.tables) {
        os << '\n' << t.title << '\n';
        std::vector<std::vector<std::string>> cells;
        cells.push_back(t.columns);
        for (const auto& row : t.rows) {
            std::vector<std::string> r;
            for (const auto& c : row)
                r.push_back(std::holds_alternative<double>(c) ? format_number(std::get<double>(c)) : std::get<std::string>(c));
            cells.push_back(std::move(r));
        }
        std::vector<std::size_t> width;
        for (const auto& r : cells)
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (width.size() <= i) width.push_back(0);
                width[i] = std::max(width[i], r[i].size());
            }
        for (const auto& r : cells) {
            std::string line;
            for (std::size_t i = 0; i < r.size(); ++i) {
                line += r[i];
                if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
            }
            os << "  " << line << '\n';
        }
    }
    if (!report.notes.empty()) {
        os << '\n';
        for (const auto& n : report.notes) os << "note: " << n << '\n';
    }
    return os.str();
}

SolveReport make_single_report(const MeanFieldProblem& problem, double z, const ThresholdSolution& sol) {
    SolveReport r;
    r.task = "solve-single";
    add_context(r, problem);
    r.tables.push_back({"optimal threshold against a fixed interaction level",
                        {"quantity", "value"},
                        {{std::string("z"), z},
                         {std::string("phi(z)"), problem.payoff().phi(z)},
                         {std::string("threshold"), sol.threshold},
                         {std::string("value"), sol.value},
                         {std::string("residual"), sol.residual},
                         {std::string("bracket_lo"), sol.bracket_lo},
                         {std::string("bracket_hi"), sol.bracket_hi},
                         {std::string("iterations"), static_cast<double>(sol.iterations)},
                         {std::string("yhat0"), problem.yhat0()},
                         {std::string("max_harvest_rate"), problem.max_rate()},
                         {std::string("y2"), problem.hitting().y2()}}});
    if (!sol.profitable) r.notes.push_back("no profitable harvest: best ratio is not positive");
    return r;
}

SolveReport make_mfg_report(const MeanFieldProblem& problem, const EquilibriumSet& set) {
    SolveReport r;
    r.task = "solve-mfg";
    add_context(r, problem);
    ReportTable t{"mean field equilibria", {"threshold", "value", "interaction", "residual", "dPhi", "stability", "iteration"}, {}};
    for (const auto& e : set.points)
        t.rows.push_back({e.threshold, e.value, e.level, e.residual, e.stability.derivative, stability_label(e.stability),
                          std::string(e.stability.iteration_converges ? "converges" : "diverges")});
    r.tables.push_back(std::move(t));
    r.tables.push_back({"search",
                        {"quantity", "value"},
                        {{std::string("equilibria"), static_cast<double>(set.points.size())},
                         {std::string("search_lo"), set.search_lo},
                         {std::string("search_hi"), set.search_hi},
                         {std::string("phi_evaluations"), static_cast<double>(set.evaluations)}}});
    if (!set.diagnostic.empty()) r.notes.push_back(set.diagnostic);
    if (!problem.phi_strictly_decreasing()) r.notes.push_back("phi is not strictly decreasing on its domain");
    return r;
}

SolveReport make_mfc_report(const MeanFieldProblem& problem, const MfcSolution& sol) {
    SolveReport r;
    r.task = "solve-mfc";
    add_context(r, problem);
    r.tables.push_back({"mean field control optimum",
                        {"quantity", "value"},
                        {{std::string("threshold"), sol.threshold},
                         {std::string("value"), sol.value},
                         {std::string("interaction"), sol.level},
                         {std::string("grid_lo"), sol.grid_lo},
                         {std::string("grid_hi"), sol.grid_hi},
                         {std::string("tie"), yes_no(sol.tie)}}});
    if (sol.tie) r.notes.push_back("several maxima within tolerance; smallest threshold reported");
    if (sol.degenerate) r.notes.push_back("degenerate: best population value is negative");
    return r;
}

SolveReport make_compare_report(const MeanFieldProblem& problem, const ComparisonReport& cmp) {
    SolveReport r;
    r.task = "compare";
    add_context(r, problem);
    const bool rate = problem.payoff().interaction == Interaction::HarvestRate;
    ReportTable t{"ordering", {"y_g", "value_g", "y_p", "value_p", "margin"}, {}};
    for (std::size_t i = 0; i < cmp.mfg.points.size(); ++i)
        t.rows.push_back({cmp.mfg.points[i].threshold, cmp.mfg.points[i].value, cmp.mfc.threshold, cmp.mfc.value,
                          cmp.margins[i]});
    r.tables.push_back(std::move(t));
    r.tables.push_back({"verdict",
                        {"expected", "holds", "worst_margin"},
                        {{std::string(rate ? "y_p >= y_g" : "y_p <= y_g"), yes_no(cmp.holds()), cmp.worst_margin}}});
    if (!cmp.mfg.diagnostic.empty()) r.notes.push_back(cmp.mfg.diagnostic);
    return r;
}

SolveReport make_validate_report(const Diffusion& model, const AssumptionReport& a) {
    SolveReport r;
    r.task = "validate";
    r.context.emplace_back("model", model.describe());
    r.tables.push_back({"assumption probes",
                        {"check", "passed", "evidence"},
                        {{std::string("speed measure finite"), yes_no(a.speed_mass_finite), a.speed_mass},
                         {std::string("first moment finite"), yes_no(a.first_moment_finite), a.first_moment},
                         {std::string("single drift turning point"), yes_no(a.turning_point_ok),
                          a.drift_turning_point ? *a.drift_turning_point : std::numeric_limits<double>::quiet_NaN()},
                         {std::string("turning point >= y0"), yes_no(a.turning_point_above_y0),
                          a.drift_turning_point ? *a.drift_turning_point : std::numeric_limits<double>::quiet_NaN()},
                         {std::string("scale density diverges"), yes_no(a.scale_diverges), a.scale_probe_value},
                         {std::string("entrance boundary at 0"), yes_no(a.entrance_boundary), a.entrance_integral}}});
    if (!a.entrance_boundary) {
        std::ostringstream os;
        os << "entrance integral did not converge after " << a.entrance_refinements
           << " halvings; the evidence column is the partial sum";
        r.notes.push_back(os.str());
    }
    return r;
}

SolveReport make_verify_report(const MeanFieldProblem& problem, const ThresholdSolution& sol,
                               const VerificationReport& v) {
    SolveReport r;
    r.task = "verify";
    add_context(r, problem);
    r.tables.push_back({"verification of the auxiliary problem",
                        {"check", "passed", "residual"},
                        {{std::string("g(y0) = 0"), yes_no(v.g_y0_ok), v.g_y0},
                         {std::string("g >= f - K"), yes_no(v.dominates_payoff), v.min_g_minus_payoff},
                         {std::string("u(x, y0) <= 0"), yes_no(v.u_nonpositive), v.max_u},
                         {std::string("u(y*, y0) = 0"), yes_no(v.threshold_tight), v.u_at_threshold},
                         {std::string("value = ratio at y*"), yes_no(v.ratio_consistent), v.ratio_gap}}});
    r.tables.push_back({"solution",
                        {"quantity", "value"},
                        {{std::string("threshold"), sol.threshold},
                         {std::string("value"), sol.value},
                         {std::string("tolerance"), v.tolerance},
                         {std::string("grid_points"), static_cast<double>(v.stopping.x.size())},
                         {std::string("passed"), yes_no(v.passed())}}});
    return r;
}

SolveReport make_simulation_report(const MeanFieldProblem& problem, const SimulationSummary& s) {
    SolveReport r;
    r.task = "simulate";
    add_context(r, problem);
    std::ostringstream os;
    os << "dt=" << format_number(s.config.dt) << ", seed=" << s.config.seed << ", paths=" << s.paths
       << ", horizon=" << format_number(s.config.horizon) << ", bridge=" << yes_no(s.config.bridge);
    r.context.emplace_back("simulation", os.str());
    const auto row = [](const char* name, const Estimate& e, double ref) -> std::vector<Cell> {
        return {std::string(name), e.mean, e.se, ref, e.z_score(ref), static_cast<double>(e.samples)};
    };
    r.tables.push_back({"Monte Carlo against analytic values at threshold " + format_number(s.threshold),
                        {"estimator", "mean", "se", "analytic", "z", "samples"},
                        {row("hitting time", s.hitting_time, s.xi), row("stationary mean", s.stationary_mean, s.expected_stock),
                         row("long-run value", s.value, s.analytic_value)}});
    const std::int64_t floors = s.hitting_time.floor_hits + s.stationary_mean.floor_hits + s.value.floor_hits;
    r.tables.push_back({"diagnostics",
                        {"quantity", "value"},
                        {{std::string("capped_paths"), static_cast<double>(s.hitting_time.capped)},
                         {std::string("floor_activations"), static_cast<double>(floors)},
                         {std::string("impulses"), static_cast<double>(s.value.impulses)}}});
    if (s.hitting_time.flagged) r.notes.push_back("more than 0.1% of hitting-time paths reached the time cap");
    return r;
}

SolveReport make_sweep_report(const SweepConfig& config, const std::vector<SweepRow>& rows) {
    SolveReport r;
    r.task = "sweep";
    std::ostringstream os;
    os << "logistic, beta=" << format_number(config.beta) << ", y0=" << format_number(config.y0) << ", phi(z)=" << config.phi
       << ", interaction=" << to_string(config.interaction);
    r.context.emplace_back("family", os.str());
    std::ostringstream ranges;
    ranges << "q in [" << format_number(config.q_lo) << ", " << format_number(config.q_hi) << "], b in ["
           << format_number(config.b_lo) << ", " << format_number(config.b_hi) << "], K in [" << format_number(config.K_lo)
           << ", " << format_number(config.K_hi) << "], draws=" << config.draws << ", seed=" << config.seed;
    r.context.emplace_back("draws", ranges.str());
    int holds = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
        holds += row.holds ? 1 : 0;
        worst = std::min(worst, row.margin);
    }
    r.tables.push_back({"ordering sweep",
                        {"draws", "holds", "worst_margin"},
                        {{static_cast<double>(rows.size()), static_cast<double>(holds), worst}}});
    for (const auto& row : rows)
        if (!row.holds) {
            std::ostringstream n;
            n << "draw " << row.index << " (q=" << format_number(row.q) << ", b=" << format_number(row.b)
              << ", K=" << format_number(row.K) << ") fails: margin " << format_number(row.margin);
            if (!row.error.empty()) n << ", " << row.error;
            r.notes.push_back(n.str());
        }
    return r;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os.precision(10);
    os << "index,q,b,K,y_g,value_g,y_p,value_p,margin,holds\n";
    for (const auto& r : rows) {
        const auto join = [](const std::vector<double>& v) {
            std::ostringstream s;
            s.precision(10);
            for (std::size_t i = 0; i < v.size(); ++i) s << (i ? ";" : "") << v[i];
            return s.str();
        };
        os << r.index << ',' << r.q << ',' << r.b << ',' << r.K << ',' << join(r.y_g) << ',' << join(r.value_g) << ','
           << r.y_p << ',' << r.value_p << ',' << r.margin << ',' << (r.holds ? 1 : 0) << '\n';
    }
    return os.str();
}

}  // namespace mfharvest

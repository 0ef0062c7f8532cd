#include <catch_amalgamated.hpp>

#include <cmath>

#include "mfharvest/errors.hpp"
#include "mfharvest/report.hpp"

using namespace mfharvest;
using Catch::Matchers::ContainsSubstring;

namespace {

MeanFieldProblem problem() {
    return MeanFieldProblem(Diffusion::logistic({-1.0, 0.5, 1.0}, 1.0),
                            PayoffSpec::from_expression(1.0, "1/(z+1)", Interaction::HarvestRate));
}

}  // namespace

TEST_CASE("report: property json round trip preserves the rendered table") {
    auto p = problem();
    for (const auto& rep : {make_mfg_report(p, p.mfg_equilibrium()), make_mfc_report(p, p.mfc_optimum()),
                            make_compare_report(p, p.compare()),
                            make_single_report(p, 0.0, p.best_response(0.0)),
                            make_validate_report(p.hitting().model(), validate_assumptions(p.hitting().model()))}) {
        const std::string json = to_json(rep);
        const SolveReport back = report_from_json(json);
        CHECK(render_text(back) == render_text(rep));
        CHECK(to_json(back) == json);
    }
}

TEST_CASE("report: non-finite numbers survive the round trip") {
    SolveReport rep;
    rep.task = "t";
    rep.context = {{"k", "v"}};
    rep.tables.push_back({"numbers", {"a", "b", "c"}, {{INFINITY, -INFINITY, NAN}, {1.5, std::string("x"), 0.0}}});
    rep.notes = {"note"};
    auto back = report_from_json(to_json(rep));
    REQUIRE(back.tables.size() == 1);
    const auto& row = back.tables[0].rows[0];
    CHECK(std::isinf(std::get<double>(row[0])));
    CHECK(std::get<double>(row[1]) < 0.0);
    CHECK(std::isnan(std::get<double>(row[2])));
    CHECK(std::get<std::string>(back.tables[0].rows[1][1]) == "x");
    CHECK(render_text(back) == render_text(rep));
}

TEST_CASE("report: rendering and number format") {
    CHECK(format_number(5.130843) == "5.13084");
    CHECK(format_number(1e-12) == "1e-12");
    auto p = problem();
    auto text = render_text(make_mfg_report(p, p.mfg_equilibrium()));
    CHECK_THAT(text, ContainsSubstring("5.13084"));
    CHECK_THAT(text, ContainsSubstring("stable"));
}

TEST_CASE("report: malformed json is a parse error") {
    CHECK_THROWS_AS(report_from_json("{"), ParseError);
    CHECK_THROWS_AS(report_from_json(R"({"task": 3})"), ParseError);
}

TEST_CASE("report: sweep csv has one row per draw") {
    SweepConfig cfg;
    cfg.draws = 3;
    auto rows = run_sweep(cfg);
    auto csv = sweep_csv(rows);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    auto rep = make_sweep_report(cfg, rows);
    CHECK_THAT(render_text(rep), ContainsSubstring("ordering sweep"));
}

#include <catch_amalgamated.hpp>

#include <cmath>

#include "mfharvest/meanfield.hpp"

using namespace mfharvest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Diffusion base_model() { return Diffusion::logistic({-1.0, 0.5, 1.0}, 1.0); }

MeanFieldProblem harvest_problem() {
    return MeanFieldProblem(base_model(), PayoffSpec::from_expression(1.0, "1/(z+1)", Interaction::HarvestRate));
}

MeanFieldProblem stock_problem() {
    return MeanFieldProblem(base_model(),
                            PayoffSpec::from_expression(1.0, "1/(1+exp(10*(z-1.9)))", Interaction::ExpectedStock));
}

}  // namespace

TEST_CASE("meanfield: harvest-rate equilibrium matches frozen values") {
    auto p = harvest_problem();
    auto set = p.mfg_equilibrium();
    REQUIRE(set.points.size() == 1);
    const auto& eq = set.points.front();
    CHECK_THAT(eq.threshold, WithinRel(5.1308431, 1e-6));
    CHECK_THAT(eq.value, WithinRel(0.24288269, 1e-6));
    CHECK(eq.residual < 1e-8);
    CHECK(eq.stability.stable);
    CHECK(eq.stability.consistent());
    CHECK_THAT(eq.stability.derivative, WithinAbs(-0.1109, 1e-3));
    // fixed point: level reproduces the threshold through phi
    CHECK_THAT(eq.level, WithinRel(p.interaction_level(eq.threshold), 1e-12));
    CHECK_THAT(p.best_response(eq.level).threshold, WithinAbs(eq.threshold, 1e-8));
}

TEST_CASE("meanfield: harvest-rate control optimum matches frozen values") {
    auto p = harvest_problem();
    auto mfc = p.mfc_optimum();
    CHECK_THAT(mfc.threshold, WithinRel(5.8986981, 1e-6));
    CHECK_THAT(mfc.value, WithinRel(0.2536036, 1e-6));
    CHECK_FALSE(mfc.tie);
    CHECK_FALSE(mfc.degenerate);
    // planner optimum dominates the equilibrium population value
    CHECK(mfc.value >= p.population_value(5.1308431));
    auto cmp = p.compare();
    CHECK(cmp.holds());
    CHECK_THAT(cmp.worst_margin, WithinAbs(5.8986981 - 5.1308431, 1e-5));
}

TEST_CASE("meanfield: bounds and derived quantities") {
    auto p = harvest_problem();
    CHECK_THAT(p.yhat0(), WithinRel(2.8557468, 1e-7));
    CHECK_THAT(p.max_rate(), WithinRel(0.86055313, 1e-7));
    CHECK(p.phi_strictly_decreasing());
    auto [lo, hi] = p.critical_bounds();
    CHECK(lo < 5.1308431);
    CHECK(hi > 5.1308431);
}

TEST_CASE("meanfield: property Phi is decreasing above yhat0 for harvest-rate interaction") {
    auto p = harvest_problem();
    double prev = INFINITY;
    for (int i = 0; i <= 40; ++i) {
        const double y = p.yhat0() + 0.5 * i;
        const double t = p.phi_map(y).threshold;
        CHECK(t < prev + 1e-9);
        prev = t;
    }
}

TEST_CASE("meanfield: property Phi is nondecreasing for expected-stock interaction") {
    auto p = stock_problem();
    double prev = 0.0;
    for (int i = 1; i <= 60; ++i) {
        const double y = 1.0 + 0.25 * i;
        const double t = p.phi_map(y).threshold;
        CHECK(t >= prev - 1e-9);
        prev = t;
    }
}

TEST_CASE("meanfield: expected-stock equilibria for the steep price function") {
    auto p = stock_problem();
    auto [z1, z2] = p.stationary().stock_bounds();
    CHECK_THAT(z1, WithinRel(0.60778881, 1e-7));
    CHECK_THAT(z2, WithinRel(2.0, 1e-10));
    auto set = p.mfg_equilibrium();
    // c(y) < z2 = 2 for every threshold, so only the low-stock equilibrium exists
    REQUIRE(set.points.size() == 1);
    CHECK_THAT(set.points[0].threshold, WithinRel(4.435419, 1e-5));
    CHECK_THAT(set.points[0].level, WithinRel(1.32314, 1e-5));
    CHECK(set.points[0].stability.stable);
    auto mfc = p.mfc_optimum();
    CHECK_THAT(mfc.threshold, WithinRel(4.3896206, 1e-6));
    auto cmp = p.compare();
    CHECK(cmp.holds());
    CHECK(mfc.threshold <= set.points[0].threshold);
}

TEST_CASE("meanfield: constant price collapses game and control to the single-agent problem") {
    for (auto kind : {Interaction::HarvestRate, Interaction::ExpectedStock}) {
        MeanFieldProblem p(base_model(), PayoffSpec::constant(1.0, 0.7, kind));
        const auto single = best_response(p.hitting(), 1.0, 0.7);
        auto set = p.mfg_equilibrium();
        REQUIRE(set.points.size() == 1);
        CHECK_THAT(set.points[0].threshold, WithinRel(single.threshold, 1e-8));
        CHECK_THAT(set.points[0].stability.derivative, WithinAbs(0.0, 1e-6));
        auto mfc = p.mfc_optimum();
        CHECK_THAT(mfc.threshold, WithinRel(single.threshold, 1e-7));
        CHECK_THAT(mfc.value, WithinRel(single.value, 1e-10));
    }
}

TEST_CASE("meanfield: property ordering holds on a small randomized sweep") {
    for (auto kind : {Interaction::HarvestRate, Interaction::ExpectedStock}) {
        SweepConfig cfg;
        cfg.draws = 12;
        cfg.seed = 99;
        cfg.interaction = kind;
        auto rows = run_sweep(cfg);
        REQUIRE(rows.size() == 12);
        for (const auto& r : rows) {
            INFO("draw " << r.index << " q=" << r.q << " b=" << r.b << " K=" << r.K << " " << r.error);
            CHECK(r.error.empty());
            CHECK(r.holds);
            CHECK(r.margin >= -1e-6);
        }
    }
}

TEST_CASE("meanfield: sweep draws are reproducible and thread-independent") {
    SweepConfig cfg;
    cfg.draws = 6;
    cfg.threads = 1;
    auto a = run_sweep(cfg);
    cfg.threads = 3;
    auto b = run_sweep(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].q == b[i].q);
        CHECK(a[i].y_p == b[i].y_p);
        CHECK(a[i].y_g == b[i].y_g);
    }
}

TEST_CASE("meanfield: drift maximum below y0 gives yhat0 = y0 and still solves") {
    // y1 = (1/2 - q) / (2b) < 1: xi is convex from y0, so the harvest rate peaks only as y -> y0
    const auto m = Diffusion::logistic({-0.449, 0.8807, 1.0}, 1.0);
    for (auto kind : {Interaction::HarvestRate, Interaction::ExpectedStock}) {
        MeanFieldProblem p(m, PayoffSpec::from_expression(1.7976, "1/(1+z)", kind));
        CHECK(*p.hitting().y1() < 1.0);
        CHECK_THAT(p.yhat0(), WithinAbs(1.0, 1e-6));
        CHECK(p.scan_cap() > 1.0);
        auto cmp = p.compare();
        REQUIRE_FALSE(cmp.mfg.points.empty());
        CHECK(cmp.holds());
    }
}

#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "mfharvest/errors.hpp"
#include "mfharvest/hitting.hpp"
#include "mfharvest/simulation.hpp"
#include "mfharvest/stationary.hpp"

using namespace mfharvest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Diffusion base_model() { return Diffusion::logistic({-1.0, 0.5, 1.0}, 1.0); }

SimConfig quick(unsigned threads = 0) {
    SimConfig c;
    c.dt = 1e-3;
    c.horizon = 4000.0;
    c.threads = threads;
    return c;
}

}  // namespace

TEST_CASE("simulation: stream seeds are distinct and deterministic") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(stream_seed(42, i));
    CHECK(seen.size() == 1000);
    CHECK(stream_seed(42, 7) == stream_seed(42, 7));
    CHECK(stream_seed(42, 7) != stream_seed(43, 7));
}

TEST_CASE("simulation: estimates are reproducible across thread counts") {
    auto m = base_model();
    auto a = estimate_hitting_time(m, 2.0, 500, quick(1));
    auto b = estimate_hitting_time(m, 2.0, 500, quick(4));
    CHECK(a.mean == b.mean);
    CHECK(a.se == b.se);
    auto c = estimate_stationary_mean(m, 4.0, quick(1));
    auto d = estimate_stationary_mean(m, 4.0, quick(3));
    CHECK(c.mean == d.mean);
    CHECK(c.samples == d.samples);
}

TEST_CASE("simulation: hitting time agrees with xi within 4 standard errors") {
    auto m = base_model();
    HittingTimes ht(m);
    auto est = estimate_hitting_time(m, 2.0, 20000, quick());
    CHECK(est.samples == 20000);
    CHECK(est.capped == 0);
    CHECK_FALSE(est.flagged);
    CHECK(std::abs(est.z_score(ht.xi(2.0))) < 4.0);
}

TEST_CASE("simulation: grid-only crossing overshoots the hitting time") {
    auto m = base_model();
    HittingTimes ht(m);
    auto cfg = quick();
    cfg.dt = 1e-2;
    auto bridged = estimate_hitting_time(m, 2.0, 20000, cfg);
    cfg.bridge = false;
    auto grid = estimate_hitting_time(m, 2.0, 20000, cfg);
    CHECK(grid.mean > bridged.mean);
    CHECK(grid.z_score(ht.xi(2.0)) > 4.0);
    CHECK(std::abs(bridged.z_score(ht.xi(2.0))) < 4.0);
}

TEST_CASE("simulation: running cost and long-run estimators agree with analytic values") {
    auto m = base_model();
    HittingTimes ht(m);
    Stationary st(ht);
    auto rc = estimate_running_cost(m, [](double x) { return x; }, 1.0, 4.0, 20000, quick());
    CHECK(std::abs(rc.z_score(ht.expected_running_cost(LinearCost{0.0, 1.0}, 1.0, 4.0))) < 4.0);
    auto sm = estimate_stationary_mean(m, 4.0, quick());
    CHECK(sm.samples > 100);
    CHECK(std::abs(sm.z_score(st.expected_stock(4.0))) < 4.0);
    auto refl = estimate_reflected_mean(m, quick());
    CHECK(std::abs(refl.z_score(st.reflected_mean())) < 4.0);
}

TEST_CASE("simulation: occupation fractions match the controlled cdf") {
    auto m = base_model();
    Stationary st{HittingTimes(m)};
    const std::vector<double> edges{0.0, 1.0, 2.0, 4.0};
    auto occ = estimate_occupation(m, 4.0, edges, quick());
    REQUIRE(occ.size() == 3);
    double total = 0.0;
    for (std::size_t i = 0; i < occ.size(); ++i) {
        const double p = st.controlled_cdf(4.0, edges[i + 1]) - (i == 0 ? 0.0 : st.controlled_cdf(4.0, edges[i]));
        CHECK(std::abs(occ[i].z_score(p)) < 4.0);
        total += occ[i].mean;
    }
    CHECK_THAT(total, WithinAbs(1.0, 1e-9));
}

TEST_CASE("simulation: impulse paths reset to y0 from the threshold") {
    auto m = base_model();
    auto path = simulate_path(m, 3.0, 200.0, quick(), 10, {1.0, 1.0});
    REQUIRE_FALSE(path.impulse_times.empty());
    for (double x : path.pre_impulse_states) CHECK(x == 3.0);
    for (double x : path.states) {
        CHECK(x > 0.0);
        CHECK(x <= 3.0);
    }
    CHECK_THAT(path.cumulative_reward, WithinAbs(double(path.impulse_times.size()) * (2.0 - 1.0), 1e-9));
    CHECK(path.times.front() == 0.0);
    CHECK(path.states.front() == 1.0);
    std::ostringstream os;
    write_path_csv(os, path);
    CHECK(os.str().find('\n') != std::string::npos);
}

TEST_CASE("simulation: uncontrolled path and invalid input") {
    auto m = base_model();
    auto path = simulate_path(m, INFINITY, 10.0, quick(), 100);
    CHECK(path.impulse_times.empty());
    CHECK_THAT(path.times.back(), WithinAbs(10.0, 1e-9));
    auto cfg = quick();
    cfg.dt = 0.0;
    CHECK_THROWS_AS(estimate_hitting_time(m, 2.0, 10, cfg), DomainError);
    CHECK_THROWS_AS(estimate_hitting_time(m, 0.5, 10, quick()), DomainError);
}

#include <catch_amalgamated.hpp>

#include <cmath>

#include "mfharvest/errors.hpp"
#include "mfharvest/impulse.hpp"

using namespace mfharvest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

HittingTimes base() { return HittingTimes(Diffusion::logistic({-1.0, 0.5, 1.0}, 1.0)); }

double ratio(const HittingTimes& ht, double K_tilde, double y) { return (y - ht.y0() - K_tilde) / ht.xi(y); }

// brute-force maximiser of (y - y0 - K)/xi(y) on a grid of n points in (y0, hi]
std::pair<double, double> grid_oracle(const HittingTimes& ht, double K_tilde, double hi, int n = 10000) {
    double best_y = 0.0, best = -INFINITY;
    for (int i = 1; i <= n; ++i) {
        const double y = ht.y0() + (hi - ht.y0()) * i / n;
        const double r = ratio(ht, K_tilde, y);
        if (r > best) best = r, best_y = y;
    }
    return {best_y, best};
}

}  // namespace

TEST_CASE("impulse: max harvest rate and its maximiser match frozen values") {
    auto ht = base();
    CHECK_THAT(max_harvest_rate(ht), WithinRel(0.86055313, 1e-7));
    auto sol = optimal_threshold_basic(ht, 0.0);
    CHECK_THAT(sol.threshold, WithinRel(2.8557468, 1e-7));
}

TEST_CASE("impulse: property threshold agrees with a 1e4-point grid oracle") {
    auto ht = base();
    for (double K : {0.05, 0.3, 1.0, 2.0, 5.0}) {
        auto sol = optimal_threshold_basic(ht, K);
        const double hi = 3.0 * sol.threshold;
        auto [gy, gv] = grid_oracle(ht, K, hi);
        const double step = (hi - ht.y0()) / 10000;
        CHECK_THAT(sol.threshold, WithinAbs(gy, 2.0 * step));
        CHECK(sol.value >= gv - 1e-12);
        CHECK_THAT(sol.value, WithinRel(ratio(ht, K, sol.threshold), 1e-12));
        CHECK(std::abs(sol.residual) < 1e-9);
        CHECK(sol.profitable);
        CHECK(sol.threshold > ht.y2());
    }
}

TEST_CASE("impulse: property second-order condition at the optimum") {
    auto ht = base();
    for (double K : {0.2, 1.0, 3.0}) {
        auto sol = optimal_threshold_basic(ht, K);
        for (double d : {1e-3, 1e-2, 1e-1}) {
            CHECK(ratio(ht, K, sol.threshold + d) < sol.value);
            CHECK(ratio(ht, K, sol.threshold - d) < sol.value);
        }
        CHECK_THAT(first_order_residual(ht, K, sol.threshold), WithinAbs(0.0, 1e-9 * ht.xi(sol.threshold)));
    }
}

TEST_CASE("impulse: property threshold is increasing and value decreasing in the fixed cost") {
    auto ht = base();
    double prev_y = 0.0, prev_v = INFINITY;
    for (int i = 0; i <= 30; ++i) {
        auto sol = optimal_threshold_basic(ht, 0.1 * i);
        CHECK(sol.threshold > prev_y);
        CHECK(sol.value < prev_v);
        prev_y = sol.threshold;
        prev_v = sol.value;
    }
}

TEST_CASE("impulse: property price scaling invariance of best responses") {
    auto ht = base();
    for (double c : {0.25, 1.0, 3.0}) {
        auto a = best_response(ht, 1.0, 0.8);
        auto b = best_response(ht, c * 1.0, c * 0.8);
        CHECK_THAT(b.threshold, WithinRel(a.threshold, 1e-9));
        CHECK_THAT(b.value, WithinRel(c * a.value, 1e-9));
    }
    auto z0 = best_response(ht, 1.0, 1.0);
    CHECK_THAT(z0.threshold, WithinRel(optimal_threshold_basic(ht, 1.0).threshold, 1e-12));
    CHECK_THROWS_AS(best_response(ht, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(best_response(ht, 1.0, -1.0), DomainError);
}

TEST_CASE("impulse: auxiliary problem reproduces the basic solution") {
    auto ht = base();
    const double price = 1.0 / 1.2;
    AuxiliaryProblem aux{[price](double y) { return price * (y - 1.0); }, {}, {}, 1.0};
    auto sol = solve_auxiliary(ht, aux);
    auto ref = best_response(ht, 1.0, price);
    CHECK_THAT(sol.threshold, WithinRel(ref.threshold, 1e-7));
    CHECK_THAT(sol.value, WithinRel(ref.value, 1e-10));
    CHECK_THAT(ref.threshold, WithinRel(4.642174437, 1e-8));
}

TEST_CASE("impulse: property auxiliary threshold decreases with the reward slope") {
    auto ht = base();
    double prev = INFINITY;
    for (double lambda : {0.5, 0.8, 1.0, 1.5, 3.0}) {
        AuxiliaryProblem aux{[lambda](double y) { return lambda * (y - 1.0); }, {}, {}, 1.0};
        auto sol = solve_auxiliary(ht, aux);
        CHECK(sol.threshold < prev);
        prev = sol.threshold;
    }
}

TEST_CASE("impulse: running cost lowers the auxiliary value") {
    auto ht = base();
    AuxiliaryProblem free{[](double y) { return y - 1.0; }, {}, {}, 1.0};
    AuxiliaryProblem costly{[](double y) { return y - 1.0; }, LinearCost{0.0, 0.05}, {}, 1.0};
    auto a = solve_auxiliary(ht, free);
    auto b = solve_auxiliary(ht, costly);
    CHECK(b.value < a.value);
    // h(x) = c shifts the ratio by exactly -c
    AuxiliaryProblem flat{[](double y) { return y - 1.0; }, LinearCost{0.1, 0.0}, {}, 1.0};
    CHECK_THAT(flat.ratio(ht, 4.0), WithinRel(free.ratio(ht, 4.0) - 0.1, 1e-9));
    CHECK_THAT(solve_auxiliary(ht, flat).threshold, WithinRel(a.threshold, 1e-6));
}

TEST_CASE("impulse: verification of the optimal threshold passes") {
    auto ht = base();
    const double price = 1.0 / 1.2;
    AuxiliaryProblem aux{[price](double y) { return price * (y - 1.0); }, {}, {}, 1.0};
    auto sol = solve_auxiliary(ht, aux);
    auto rep = verify_solution(ht, sol, aux);
    CHECK(rep.passed());
    CHECK_THAT(rep.g_y0, WithinAbs(0.0, 1e-6));
    CHECK(rep.min_g_minus_payoff >= -1e-6);
    CHECK_THAT(rep.u_at_threshold, WithinAbs(0.0, 1e-6));
    CHECK_THAT(rep.stopping.stopping_threshold, WithinRel(sol.threshold, 1e-4));
}

TEST_CASE("impulse: perturbed thresholds fail verification") {
    auto ht = base();
    const double price = 1.0 / 1.2;
    AuxiliaryProblem aux{[price](double y) { return price * (y - 1.0); }, {}, {}, 1.0};
    auto sol = solve_auxiliary(ht, aux);

    // y* + 0.5 with its own (smaller) ratio: stopping earlier is strictly better, g(y0) > 0
    auto up = sol;
    up.threshold += 0.5;
    up.value = aux.ratio(ht, up.threshold);
    auto r_up = verify_solution(ht, up, aux);
    CHECK_FALSE(r_up.passed());
    CHECK_FALSE(r_up.g_y0_ok);
    CHECK(r_up.g_y0 > 1e-6);
    CHECK(r_up.u_at_threshold > 1e-6);

    // y* - 0.5 keeping rho*: u(y'*, y0) < -tol
    auto down = sol;
    down.threshold -= 0.5;
    auto r_down = verify_solution(ht, down, aux);
    CHECK_FALSE(r_down.passed());
    CHECK(r_down.u_at_threshold < -1e-6);

    // y* + 0.5 keeping rho*: value no longer matches the ratio
    auto mismatch = sol;
    mismatch.threshold += 0.5;
    CHECK_FALSE(verify_solution(ht, mismatch, aux).ratio_consistent);
}

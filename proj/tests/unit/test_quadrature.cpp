#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "mfharvest/quadrature.hpp"

using namespace mfharvest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("quadrature: smooth finite intervals") {
    auto r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK(r.converged);
    CHECK_THAT(r.value, WithinRel(2.0, 1e-12));
    // reversed limits flip the sign
    CHECK_THAT(integrate([](double x) { return x * x; }, 3.0, 0.0).value, WithinRel(-9.0, 1e-13));
    // very short interval far from the origin
    auto tiny = integrate([](double x) { return std::exp(x); }, 50.0, 50.0 + 1e-9);
    CHECK_THAT(tiny.value, WithinRel(std::exp(50.0) * std::expm1(1e-9), 1e-5));
    CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
}

TEST_CASE("quadrature: integrable singularity at zero") {
    auto r = integrate_from_zero([](double x) { return 1.0 / std::sqrt(x); }, 1.0);
    CHECK(r.converged);
    CHECK_THAT(r.value, WithinRel(2.0, 1e-8));
    auto g = integrate_from_zero([](double x) { return std::pow(x, -0.9); }, 1.0, {1e-12, 1e-10}, 60);
    CHECK_THAT(g.value, WithinRel(10.0, 1e-6));
}

TEST_CASE("quadrature: divergent endpoint is reported, not hidden") {
    auto r = integrate_from_zero([](double x) { return 1.0 / x; }, 1.0);
    CHECK_FALSE(r.converged);
    CHECK(r.value > 20.0);
    auto t = integrate_to_infinity([](double x) { return 1.0 / x; }, 1.0);
    CHECK_FALSE(t.converged);
}

TEST_CASE("quadrature: infinite upper limit") {
    auto r = integrate_to_infinity([](double x) { return std::exp(-x); }, 1.0);
    CHECK(r.converged);
    CHECK_THAT(r.value, WithinRel(std::exp(-1.0), 1e-9));
    auto p = integrate_to_infinity([](double x) { return 1.0 / (x * x); }, 2.0);
    CHECK_THAT(p.value, WithinRel(0.5, 1e-7));
}

TEST_CASE("quadrature: range dispatch") {
    const double inf = std::numeric_limits<double>::infinity();
    auto gauss = [](double x) { return std::exp(-x * x); };
    CHECK_THAT(integrate_range(gauss, 0.0, inf).value, WithinRel(std::sqrt(std::numbers::pi) / 2, 1e-9));
    CHECK_THAT(integrate_range([](double x) { return x; }, 0.0, 4.0).value, WithinRel(8.0, 1e-13));
    CHECK_THAT(integrate_range([](double x) { return std::exp(-x); }, 0.0, inf).value, WithinAbs(1.0, 1e-9));
}

TEST_CASE("quadrature: derivative kinks converge to the requested tolerance") {
    auto kink = [](double x) { return x < 1.0 ? x : x * x; };
    const double exact = 0.5 + 26.0 / 3.0;
    auto r = integrate(kink, 0.0, 3.0);
    CHECK(r.converged);
    CHECK_THAT(r.value, WithinRel(exact, 1e-9));
    auto z = integrate_from_zero([](double x) { return std::abs(x - 1.0); }, 4.5);
    CHECK(z.converged);
    CHECK_THAT(z.value, WithinRel(0.5 + 0.5 * 3.5 * 3.5, 1e-9));
}

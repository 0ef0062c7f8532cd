#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mfharvest/diffusion.hpp"
#include "mfharvest/errors.hpp"

using namespace mfharvest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// 50 log-spaced points on [lo, hi]
std::vector<double> log_grid(double lo, double hi, int n = 50) {
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back(lo * std::pow(hi / lo, i / double(n - 1)));
    return xs;
}

Diffusion base_model() { return Diffusion::logistic({-1.0, 0.5, 1.0}, 1.0); }

}  // namespace

TEST_CASE("diffusion: logistic coefficients and closed-form densities") {
    auto m = base_model();
    CHECK(m.has_closed_forms());
    CHECK_THAT(m.drift(2.0), WithinRel(2.0 * (1.5 - 0.5 * 2.0), 1e-15));
    CHECK_THAT(m.volatility(2.0), WithinRel(2.0, 1e-15));
    // s(x) = x^-3 e^(x-1), m(x) = 2 x e^(1-x) for q=-1, b=1/2, beta=1, a=1
    for (double x : {0.1, 1.0, 3.0, 20.0}) {
        CHECK_THAT(m.scale_density(x), WithinRel(std::pow(x, -3.0) * std::exp(x - 1.0), 1e-13));
        CHECK_THAT(m.speed_density(x), WithinRel(2.0 * x * std::exp(1.0 - x), 1e-13));
    }
    CHECK(m.scale_function(1.0) == 0.0);
    CHECK(m.scale_function(2.0) > 0.0);
    CHECK(m.scale_function(0.5) < 0.0);
}

TEST_CASE("diffusion: speed moments match Gamma integrals") {
    auto m = base_model();
    const double inf = std::numeric_limits<double>::infinity();
    const double e = std::exp(1.0);
    CHECK_THAT(m.speed_moment(0, 0.0, inf), WithinRel(2.0 * e, 1e-12));
    CHECK_THAT(m.speed_moment(1, 0.0, inf), WithinRel(4.0 * e, 1e-12));
    CHECK_THAT(m.speed_moment(2, 0.0, inf), WithinRel(12.0 * e, 1e-12));
    // partial: int_0^1 2x e^(1-x) dx = 2e (1 - 2/e)
    CHECK_THAT(m.speed_moment(0, 0.0, 1.0), WithinRel(2.0 * e * (1.0 - 2.0 / e), 1e-12));
    CHECK_THAT(m.speed_measure(0.0, 1.0).value, WithinRel(2.0 * e * (1.0 - 2.0 / e), 1e-9));
    // far tail uses the upper incomplete gamma without cancellation
    CHECK_THAT(m.speed_moment(0, 60.0, inf), WithinRel(2.0 * e * 61.0 * std::exp(-60.0), 1e-10));
}

TEST_CASE("diffusion: property |m s sigma^2 - 2| < 1e-8 on a 50-point grid") {
    for (const auto& model : {base_model(), base_model().generic(),
                              Diffusion::logistic({-0.3, 0.9, 0.7}, 2.0)}) {
        for (double x : log_grid(0.01, 100.0)) {
            const double sig = model.volatility(x);
            CHECK_THAT(model.speed_density(x) * model.scale_density(x) * sig * sig, WithinAbs(2.0, 1e-8));
        }
    }
}

TEST_CASE("diffusion: property |s(x) int_0^x mu m - 1| < 1e-6 on [y0, 10 y0]") {
    for (const auto& model : {base_model(), base_model().generic()}) {
        for (double x : log_grid(model.y0(), 10.0 * model.y0())) {
            auto mu_m = model.speed_integral([&](double u) { return model.drift(u); }, 0.0, x);
            CHECK_THAT(model.scale_density(x) * mu_m.value, WithinAbs(1.0, 1e-6));
        }
    }
}

TEST_CASE("diffusion: generic quadrature path agrees with closed forms") {
    auto closed = base_model();
    auto generic = closed.generic();
    CHECK_FALSE(generic.has_closed_forms());
    for (double x : log_grid(0.1, 100.0)) {
        CHECK_THAT(generic.scale_exponent(x), WithinAbs(closed.scale_exponent(x), 1e-8));
        CHECK_THAT(generic.scale_density(x), WithinRel(closed.scale_density(x), 1e-8));
    }
    CHECK_THAT(generic.speed_measure(0.0, std::numeric_limits<double>::infinity()).value,
               WithinRel(2.0 * std::exp(1.0), 1e-8));
    CHECK_THAT(generic.scale_between(1.0, 5.0), WithinRel(closed.scale_between(1.0, 5.0), 1e-8));
}

TEST_CASE("diffusion: custom expression drift matches the logistic family") {
    auto custom = Diffusion::custom([](double x) { return x * (1.5 - 0.5 * x); }, [](double x) { return x; }, 1.0);
    auto closed = base_model();
    for (double x : {0.2, 1.0, 4.0, 30.0}) {
        CHECK_THAT(custom.scale_density(x), WithinRel(closed.scale_density(x), 1e-8));
        CHECK_THAT(custom.speed_density(x), WithinRel(closed.speed_density(x), 1e-8));
    }
}

TEST_CASE("diffusion: property reference shift rescales s and m by reciprocal constants") {
    auto m1 = base_model();
    auto m2 = m1.with_reference(3.0);
    CHECK(m2.reference() == 3.0);
    const double c = m2.scale_density(2.0) / m1.scale_density(2.0);
    for (double x : log_grid(0.1, 50.0, 20)) {
        CHECK_THAT(m2.scale_density(x) / m1.scale_density(x), WithinRel(c, 1e-10));
        CHECK_THAT(m2.speed_density(x) * c, WithinRel(m1.speed_density(x), 1e-10));
        // S(x) - S(y0) is rescaled by the same constant
        CHECK_THAT(m2.scale_between(1.0, x), WithinRel(c * m1.scale_between(1.0, x), 1e-8));
    }
}

TEST_CASE("diffusion: invalid input throws") {
    CHECK_THROWS_AS(Diffusion::logistic({0.5, 0.5, 1.0}, 1.0), DomainError);
    CHECK_THROWS_AS(Diffusion::logistic({-1.0, 0.0, 1.0}, 1.0), DomainError);
    CHECK_THROWS_AS(Diffusion::logistic({-1.0, 0.5, 1.0}, -1.0), DomainError);
    CHECK_THROWS_AS(base_model().scale_density(-1.0), DomainError);
    CHECK_THROWS_AS(base_model().speed_moment(3, 0.0, 1.0), DomainError);
}

TEST_CASE("diffusion: assumption probes for the logistic model") {
    auto rep = validate_assumptions(base_model());
    CHECK(rep.speed_mass_finite);
    CHECK_THAT(rep.speed_mass, WithinRel(2.0 * std::exp(1.0), 1e-8));
    CHECK(rep.first_moment_finite);
    REQUIRE(rep.drift_turning_point.has_value());
    CHECK_THAT(*rep.drift_turning_point, WithinRel(1.5, 1e-12));
    CHECK(rep.turning_point_ok);
    CHECK(rep.turning_point_above_y0);
    CHECK(rep.scale_diverges);
    // int_0^y0 (S(y0)-S(y)) M(dy) diverges logarithmically here, so 0 is not an entrance boundary
    CHECK_FALSE(rep.entrance_boundary);
    CHECK_FALSE(rep.all_passed());
}

TEST_CASE("diffusion: assumption probes reject models outside the class") {
    // geometric Brownian motion: infinite speed mass, no drift maximum
    auto gbm = Diffusion::custom([](double x) { return x; }, [](double x) { return 0.5 * x; }, 1.0);
    auto rep = validate_assumptions(gbm);
    CHECK_FALSE(rep.speed_mass_finite);
    CHECK_FALSE(rep.turning_point_ok);
    CHECK_FALSE(rep.scale_diverges);

    // linear mean reversion: mu strictly decreasing, so no interior turning point
    auto ou = Diffusion::custom([](double x) { return 2.0 - x; }, [](double x) { return 0.5 * x; }, 1.0);
    auto r2 = validate_assumptions(ou);
    CHECK_FALSE(r2.turning_point_ok);
    CHECK(r2.speed_mass_finite);
}

TEST_CASE("diffusion: drift turning point") {
    CHECK_THAT(*drift_turning_point(Diffusion::logistic({-0.5, 0.25, 2.0}, 1.0)), WithinRel(8.0, 1e-12));
    auto custom = Diffusion::custom([](double x) { return x * (3.0 - x); }, [](double x) { return x; }, 1.0);
    CHECK_THAT(*drift_turning_point(custom), WithinRel(1.5, 1e-7));
}

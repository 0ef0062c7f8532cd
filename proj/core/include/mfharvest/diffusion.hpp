#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "mfharvest/quadrature.hpp"

namespace mfharvest {

/// dX = X(growth - b X) dt + beta X dW, parameterised by q = 1/2 - growth/beta^2.
struct LogisticParams {
    double q = -1.0;
    double b = 0.5;
    double beta = 1.0;

    [[nodiscard]] double growth() const noexcept { return (0.5 - q) * beta * beta; }
    [[nodiscard]] double rho() const noexcept { return 2.0 * b / (beta * beta); }
};

/// A regular one-dimensional diffusion on (0, ∞) with restart level y0.
///
/// Immutable value type. Copies share the precomputed exponent table, so
/// every query is a pure function and safe to call concurrently.
///
/// Scale and speed densities are anchored at the reference point `a`
/// (default y0): s(x) = exp(-∫_a^x 2μ/σ²), m(x) = 2 / (σ²(x) s(x)).
class Diffusion {
public:
    using Coefficient = std::function<double(double)>;

    /// Throws DomainError unless q < 0, b > 0, beta > 0, y0 > 0.
    static Diffusion logistic(const LogisticParams& params, double y0, std::optional<double> reference = {});

    /// Generic model from drift and volatility callables. The texts are carried
    /// into reports only.
    static Diffusion custom(Coefficient drift, Coefficient volatility, double y0,
                            std::optional<double> reference = {}, std::string drift_text = {},
                            std::string volatility_text = {});

    /// Same coefficients with every closed form disabled; the quadrature path
    /// used as an oracle for the logistic specialisation.
    [[nodiscard]] Diffusion generic() const;
    [[nodiscard]] Diffusion with_reference(double reference) const;
    [[nodiscard]] Diffusion with_tolerance(Tolerance tol) const;

    [[nodiscard]] double drift(double x) const;
    [[nodiscard]] double volatility(double x) const;
    [[nodiscard]] double y0() const noexcept;
    [[nodiscard]] double reference() const noexcept;
    [[nodiscard]] const std::optional<LogisticParams>& logistic_params() const noexcept;
    [[nodiscard]] bool has_closed_forms() const noexcept;
    [[nodiscard]] Tolerance tolerance() const noexcept;
    [[nodiscard]] std::string describe() const;

    /// ∫_a^x 2μ(u)/σ²(u) du.
    [[nodiscard]] double scale_exponent(double x) const;
    /// s(x). Throws DomainError for x <= 0 or a non-finite result.
    [[nodiscard]] double scale_density(double x) const;
    /// m(x). Same error contract as scale_density.
    [[nodiscard]] double speed_density(double x) const;
    /// S(x) with S(a) = 0. Throws OverflowError when the integral leaves double range.
    [[nodiscard]] double scale_function(double x) const;
    /// S(y) - S(x), computed directly rather than as a difference of two S values.
    [[nodiscard]] double scale_between(double x, double y) const;

    /// M[lo, hi]; lo == 0 and hi == inf are improper endpoints. Divergence is
    /// reported through Integral::converged, not thrown.
    [[nodiscard]] Integral speed_measure(double lo, double hi) const;
    /// ∫_lo^hi h(u) m(u) du with the same endpoint handling.
    [[nodiscard]] Integral speed_integral(const Integrand& h, double lo, double hi) const;
    /// ∫_lo^hi u^power m(u) du (power 0, 1 or 2). Closed form for logistic
    /// models. Throws DomainError on divergence.
    [[nodiscard]] double speed_moment(int power, double lo, double hi) const;

private:
    struct State;
    explicit Diffusion(std::shared_ptr<const State> state);
    std::shared_ptr<const State> state_;
};

/// Evidence gathered by validate_assumptions. Every flag carries the number that produced it.
struct AssumptionReport {
    bool speed_mass_finite = false;
    double speed_mass = 0.0;            // M(0, ∞), partial sum when divergent
    bool first_moment_finite = false;
    double first_moment = 0.0;          // ∫ x m(x) dx
    std::optional<double> drift_turning_point;  // y1
    bool turning_point_ok = false;      // single max of μ: increasing before, strictly decreasing after
    bool turning_point_above_y0 = false;
    bool scale_diverges = false;
    double scale_probe_x = 0.0;
    double scale_probe_value = 0.0;     // s at the largest probed x
    bool entrance_boundary = false;
    double entrance_integral = 0.0;     // ∫_0^y0 (S(y0) - S(y)) M(dy), partial sum when divergent
    int entrance_refinements = 0;

    [[nodiscard]] bool all_passed() const noexcept {
        return speed_mass_finite && first_moment_finite && turning_point_ok && scale_diverges &&
               entrance_boundary;
    }
};

AssumptionReport validate_assumptions(const Diffusion& model);

/// Location of the maximum of the drift (y1): closed form for logistic models,
/// otherwise a 400-point log scan on [1e-3 y0, 1e3 y0] refined by Brent. Empty
/// when the maximum sits on the scan boundary.
std::optional<double> drift_turning_point(const Diffusion& model);

}  // namespace mfharvest

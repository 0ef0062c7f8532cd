#pragma once

#include "mfharvest/diffusion.hpp"

namespace mfharvest {

/// h(x) = constant + slope * x. Running costs of this form have closed-form
/// speed integrals for logistic models.
struct LinearCost {
    double constant = 0.0;
    double slope = 0.0;
    double operator()(double x) const noexcept { return constant + slope * x; }
};

/// Expected hitting times ξ(y) = E_{y0}[τ_y] and related Green-kernel functionals.
///
/// Construction caches M[0, y0], the drift turning point y1 and the convexity
/// switch y2; afterwards every member is const and thread-safe.
class HittingTimes {
public:
    explicit HittingTimes(Diffusion model);

    [[nodiscard]] const Diffusion& model() const noexcept { return model_; }
    [[nodiscard]] double y0() const noexcept { return model_.y0(); }

    /// ξ(y). Logistic models use the series while ρy < 700, quadrature otherwise.
    /// Throws DomainError for y < y0.
    [[nodiscard]] double xi(double y) const;
    /// ∫_{y0}^y s(v) M[0,v] dv.
    [[nodiscard]] double xi_quadrature(double y) const;
    /// Pochhammer series form; requires a logistic model. Throws ConvergenceError
    /// if 1e5 terms do not reach the truncation criterion.
    [[nodiscard]] double xi_series(double y) const;
    /// ξ'(y) = s(y) M[0,y].
    [[nodiscard]] double xi_prime(double y) const;
    /// ξ''(y) = 2 s(y) I(y) / σ²(y).
    [[nodiscard]] double xi_second(double y) const;
    /// I(y) = ∫_0^y (μ(u) - μ(y)) m(u) du.
    [[nodiscard]] double drift_gap_integral(double y) const;

    /// E_x[∫_0^{τ_b} h(X_s) ds] for 0 < x <= b. Throws DomainError if ∫_0^x h m diverges.
    [[nodiscard]] double expected_running_cost(const Integrand& h, double x, double b) const;
    [[nodiscard]] double expected_running_cost(LinearCost h, double x, double b) const;
    /// ∫_0^v h(u) m(u) du.
    [[nodiscard]] double cost_mass(LinearCost h, double v) const;

    [[nodiscard]] double mass_below_y0() const noexcept { return mass_y0_; }
    [[nodiscard]] std::optional<double> y1() const noexcept { return y1_; }
    /// Convexity switch: ξ'' <= 0 on [y0, y2], > 0 beyond. Equals y0 when ξ is convex throughout.
    [[nodiscard]] double y2() const noexcept { return y2_; }

private:
    void require_at_least_y0(double y) const;
    [[nodiscard]] double mass_below(double v) const;

    Diffusion model_;
    double mass_y0_ = 0.0;
    std::optional<double> y1_;
    double y2_ = 0.0;
};

}  // namespace mfharvest

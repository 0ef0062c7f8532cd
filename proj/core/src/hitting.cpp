#include "mfharvest/hitting.hpp"

#include <cmath>
#include <sstream>

#include "mfharvest/errors.hpp"

namespace mfharvest {

namespace {

constexpr double kSeriesCutoff = 700.0;
constexpr int kMaxSeriesTerms = 100000;

double pochhammer_sum(double x, double c) {
    // Σ_{n>=1} x^n / (n (c)_n)
    double term = x / c;
    double sum = term;
    for (int n = 1; n < kMaxSeriesTerms; ++n) {
        term *= x * n / ((n + 1.0) * (c + n));
        sum += term;
        if (std::abs(term) < 1e-14 * std::abs(sum)) return sum;
    }
    throw ConvergenceError("xi series did not converge within 1e5 terms");
}

}  // namespace

HittingTimes::HittingTimes(Diffusion model) : model_(std::move(model)) {
    const Integral m0 = model_.speed_measure(0.0, model_.y0());
    if (!m0.converged || !std::isfinite(m0.value)) throw DomainError("speed measure of (0, y0] diverges");
    mass_y0_ = m0.value;
    y1_ = drift_turning_point(model_);

    const double y0 = model_.y0();
    double lo = std::max(y0, y1_.value_or(y0));
    if (xi_second(lo) > 0.0) {
        // Convex from the start of the search; the concave stretch (if any) is below lo.
        double a = y0;
        double b = lo;
        if (xi_second(y0) > 0.0) {
            y2_ = y0;
            return;
        }
        for (int i = 0; i < 200 && b - a > 1e-13 * b; ++i) {
            const double mid = 0.5 * (a + b);
            (xi_second(mid) > 0.0 ? b : a) = mid;
        }
        y2_ = b;
        return;
    }
    double hi = 2.0 * lo;
    int doublings = 0;
    while (!(xi_second(hi) > 0.0)) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 60) throw NoRootError("xi'' never becomes positive; convexity switch not found");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (xi_second(mid) > 0.0 ? hi : lo) = mid;
    }
    y2_ = hi;
}

void HittingTimes::require_at_least_y0(double y) const {
    if (!(y >= model_.y0())) {
        std::ostringstream os;
        os << "threshold " << y << " lies below the restart level " << model_.y0();
        throw DomainError(os.str());
    }
}

double HittingTimes::mass_below(double v) const {
    const double y0 = model_.y0();
    if (model_.has_closed_forms()) return model_.speed_moment(0, 0.0, v);
    if (v >= y0) return mass_y0_ + model_.speed_measure(y0, v).value;
    return mass_y0_ - model_.speed_measure(v, y0).value;
}

double HittingTimes::xi(double y) const {
    require_at_least_y0(y);
    if (model_.has_closed_forms() && model_.logistic_params()->rho() * y < kSeriesCutoff) return xi_series(y);
    return xi_quadrature(y);
}

double HittingTimes::xi_quadrature(double y) const {
    require_at_least_y0(y);
    const double y0 = model_.y0();
    if (y == y0) return 0.0;
    const auto f = [this](double v) { return model_.scale_density(v) * mass_below(v); };
    const Integral r = integrate(f, y0, y, model_.tolerance());
    if (!std::isfinite(r.value)) throw OverflowError("xi integral overflows at y = " + std::to_string(y));
    return r.value;
}

double HittingTimes::xi_series(double y) const {
    if (!model_.logistic_params()) throw DomainError("xi_series requires a logistic model");
    require_at_least_y0(y);
    const auto& p = *model_.logistic_params();
    const double y0 = model_.y0();
    const double rho = p.rho();
    const double c = 1.0 - 2.0 * p.q;
    const double body = std::log(y / y0) + pochhammer_sum(rho * y, c) - pochhammer_sum(rho * y0, c);
    return body / (p.beta * p.beta * std::abs(p.q));
}

double HittingTimes::xi_prime(double y) const {
    require_at_least_y0(y);
    return model_.scale_density(y) * mass_below(y);
}

double HittingTimes::drift_gap_integral(double y) const {
    if (!(y > 0.0)) throw DomainError("drift_gap_integral requires y > 0");
    const double mu_y = model_.drift(y);
    if (model_.has_closed_forms()) {
        const auto& p = *model_.logistic_params();
        const double m1 = model_.speed_moment(1, 0.0, y);
        const double m2 = model_.speed_moment(2, 0.0, y);
        return p.growth() * m1 - p.b * m2 - mu_y * mass_below(y);
    }
    const Integral r = model_.speed_integral([&](double u) { return model_.drift(u) - mu_y; }, 0.0, y);
    if (!r.converged) throw DomainError("drift integral against the speed measure diverges");
    return r.value;
}

double HittingTimes::xi_second(double y) const {
    require_at_least_y0(y);
    const double sigma = model_.volatility(y);
    return 2.0 * model_.scale_density(y) * drift_gap_integral(y) / (sigma * sigma);
}

double HittingTimes::cost_mass(LinearCost h, double v) const {
    double out = 0.0;
    if (h.constant != 0.0) out += h.constant * mass_below(v);
    if (h.slope != 0.0) out += h.slope * model_.speed_moment(1, 0.0, v);
    return out;
}

double HittingTimes::expected_running_cost(LinearCost h, double x, double b) const {
    if (!(x > 0.0) || !(b >= x)) throw DomainError("expected_running_cost requires 0 < x <= b");
    if (x == b || (h.constant == 0.0 && h.slope == 0.0)) return 0.0;
    const auto f = [&](double v) { return model_.scale_density(v) * cost_mass(h, v); };
    const Integral r = integrate(f, x, b, model_.tolerance());
    if (std::isinf(r.value)) throw OverflowError("running cost integral overflows");
    return r.value;
}

double HittingTimes::expected_running_cost(const Integrand& h, double x, double b) const {
    if (!(x > 0.0) || !(b >= x)) throw DomainError("expected_running_cost requires 0 < x <= b");
    if (x == b) return 0.0;
    const Integral head = model_.speed_integral(h, 0.0, x);
    if (!head.converged || !std::isfinite(head.value))
        throw DomainError("running cost integral diverges at 0 (incompatible with the boundary)");
    // Fubini: ∫_x^b (S(b)-S(u)) h m du + (S(b)-S(x)) ∫_0^x h m = ∫_x^b s(v) ∫_0^v h m dv.
    const auto f = [&](double v) {
        return model_.scale_density(v) * (head.value + model_.speed_integral(h, x, v).value);
    };
    const Integral r = integrate(f, x, b, model_.tolerance());
    if (std::isinf(r.value)) throw OverflowError("running cost integral overflows");
    return r.value;
}

}  // namespace mfharvest

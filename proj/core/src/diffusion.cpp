#include "mfharvest/diffusion.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "mfharvest/errors.hpp"

namespace mfharvest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Exponent table in t = ln(x / a): nodes per decade and covered range.
constexpr int kNodesPerDecade = 16;
constexpr int kDecadesBelow = 14;
constexpr int kDecadesAbove = 6;
// The exponent feeds exp(), so its absolute error becomes a relative error in s and m.
constexpr Tolerance kExponentTol{1e-14, 1e-13};

void require_positive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        std::ostringstream os;
        os << what << " must be positive and finite, got " << x;
        throw DomainError(os.str());
    }
}

}  // namespace

struct Diffusion::State {
    Coefficient drift;
    Coefficient volatility;
    double y0 = 1.0;
    double a = 1.0;
    std::optional<LogisticParams> logistic;
    bool closed_forms = false;
    Tolerance tol;
    std::string drift_text;
    std::string volatility_text;

    double log_x0 = 0.0;  // ln of the first node
    double dt = 0.0;      // node spacing in ln x
    std::vector<double> exponent;  // ∫_a^{x_i} 2μ/σ²; NaN past a failure

    double exponent_integrand(double u) const {
        const double v = volatility(u);
        return 2.0 * drift(u) / (v * v);
    }

    void build_table() {
        const int below = kNodesPerDecade * kDecadesBelow;
        const int above = kNodesPerDecade * kDecadesAbove;
        dt = std::log(10.0) / kNodesPerDecade;
        log_x0 = std::log(a) - below * dt;
        exponent.assign(static_cast<std::size_t>(below + above + 1), kNaN);
        exponent[below] = 0.0;
        const auto g = [this](double u) { return exponent_integrand(u); };
        for (int i = below + 1; i <= below + above; ++i) {
            const Integral seg = integrate(g, node(i - 1), node(i), kExponentTol);
            if (!std::isfinite(seg.value)) break;
            exponent[i] = exponent[i - 1] + seg.value;
        }
        for (int i = below - 1; i >= 0; --i) {
            const Integral seg = integrate(g, node(i), node(i + 1), kExponentTol);
            if (!std::isfinite(seg.value)) break;
            exponent[i] = exponent[i + 1] - seg.value;
        }
    }

    [[nodiscard]] double node(int i) const { return std::exp(log_x0 + i * dt); }

    [[nodiscard]] double generic_exponent(double x) const {
        const int last = static_cast<int>(exponent.size()) - 1;
        const int i = std::clamp(static_cast<int>(std::lround((std::log(x) - log_x0) / dt)), 0, last);
        const double base = exponent[static_cast<std::size_t>(i)];
        if (!std::isfinite(base)) return kNaN;
        const double xi = node(i);
        if (xi == x) return base;
        // In ln u, so points far outside the table stay cheap.
        const auto g = [this](double t) {
            const double u = std::exp(t);
            return exponent_integrand(u) * u;
        };
        return base + integrate(g, std::log(xi), std::log(x), kExponentTol).value;
    }

    [[nodiscard]] double exponent_at(double x) const {
        if (closed_forms) {
            const auto& p = *logistic;
            return (1.0 - 2.0 * p.q) * std::log(x / a) - p.rho() * (x - a);
        }
        return generic_exponent(x);
    }
};

Diffusion::Diffusion(std::shared_ptr<const State> state) : state_(std::move(state)) {}

Diffusion Diffusion::logistic(const LogisticParams& p, double y0, std::optional<double> reference) {
    if (!(p.q < 0.0)) throw DomainError("logistic model requires q < 0 for ergodicity");
    require_positive(p.b, "b");
    require_positive(p.beta, "beta");
    require_positive(y0, "y0");
    const double a = reference.value_or(y0);
    require_positive(a, "reference point");

    auto s = std::make_shared<State>();
    const double growth = p.growth();
    s->drift = [growth, b = p.b](double x) { return x * (growth - b * x); };
    s->volatility = [beta = p.beta](double x) { return beta * x; };
    s->y0 = y0;
    s->a = a;
    s->logistic = p;
    s->closed_forms = true;
    std::ostringstream d, v;
    d.precision(17);
    v.precision(17);
    d << "x*(" << growth << " - " << p.b << "*x)";
    v << p.beta << "*x";
    s->drift_text = d.str();
    s->volatility_text = v.str();
    s->build_table();
    return Diffusion(std::move(s));
}

Diffusion Diffusion::custom(Coefficient drift, Coefficient volatility, double y0,
                            std::optional<double> reference, std::string drift_text,
                            std::string volatility_text) {
    if (!drift || !volatility) throw DomainError("drift and volatility must be callable");
    require_positive(y0, "y0");
    const double a = reference.value_or(y0);
    require_positive(a, "reference point");
    auto s = std::make_shared<State>();
    s->drift = std::move(drift);
    s->volatility = std::move(volatility);
    s->y0 = y0;
    s->a = a;
    s->drift_text = std::move(drift_text);
    s->volatility_text = std::move(volatility_text);
    s->build_table();
    return Diffusion(std::move(s));
}

Diffusion Diffusion::generic() const {
    auto s = std::make_shared<State>(*state_);
    s->closed_forms = false;
    return Diffusion(std::move(s));
}

Diffusion Diffusion::with_reference(double reference) const {
    require_positive(reference, "reference point");
    auto s = std::make_shared<State>(*state_);
    s->a = reference;
    s->build_table();
    return Diffusion(std::move(s));
}

Diffusion Diffusion::with_tolerance(Tolerance tol) const {
    auto s = std::make_shared<State>(*state_);
    s->tol = tol;
    return Diffusion(std::move(s));
}

double Diffusion::drift(double x) const { return state_->drift(x); }
double Diffusion::volatility(double x) const { return state_->volatility(x); }
double Diffusion::y0() const noexcept { return state_->y0; }
double Diffusion::reference() const noexcept { return state_->a; }
const std::optional<LogisticParams>& Diffusion::logistic_params() const noexcept { return state_->logistic; }
bool Diffusion::has_closed_forms() const noexcept { return state_->closed_forms; }
Tolerance Diffusion::tolerance() const noexcept { return state_->tol; }

std::string Diffusion::describe() const {
    std::ostringstream os;
    if (state_->logistic) {
        const auto& p = *state_->logistic;
        os << "logistic(q=" << p.q << ", b=" << p.b << ", beta=" << p.beta << ")";
    } else {
        os << "custom(drift=" << state_->drift_text << ", vol=" << state_->volatility_text << ")";
    }
    os << ", y0=" << state_->y0 << ", a=" << state_->a;
    return os.str();
}

double Diffusion::scale_exponent(double x) const {
    require_positive(x, "x");
    const double e = state_->exponent_at(x);
    if (!std::isfinite(e)) {
        std::ostringstream os;
        os << "scale exponent is not finite at x=" << x << " (volatility vanishing?)";
        throw DomainError(os.str());
    }
    return e;
}

double Diffusion::scale_density(double x) const {
    const double s = std::exp(-scale_exponent(x));
    if (!std::isfinite(s)) {
        std::ostringstream os;
        os << "scale density overflows at x=" << x;
        throw DomainError(os.str());
    }
    return s;
}

double Diffusion::speed_density(double x) const {
    const double e = scale_exponent(x);
    const double v = volatility(x);
    const double m = 2.0 * std::exp(e - 2.0 * std::log(std::abs(v)));
    if (!std::isfinite(m) || !(v != 0.0)) {
        std::ostringstream os;
        os << "speed density is not finite at x=" << x;
        throw DomainError(os.str());
    }
    return m;
}

double Diffusion::scale_between(double x, double y) const {
    require_positive(x, "x");
    require_positive(y, "y");
    if (x == y) return 0.0;
    // Integrate in ln u; s varies over many decades near 0 and grows fast at infinity.
    const auto f = [this](double t) {
        const double u = std::exp(t);
        return std::exp(t - state_->exponent_at(u));
    };
    const Integral r = integrate(f, std::log(x), std::log(y), state_->tol);
    if (std::isinf(r.value)) throw OverflowError("scale function integral overflows");
    if (!std::isfinite(r.value)) throw DomainError("scale function integral is not finite");
    return r.value;
}

double Diffusion::scale_function(double x) const { return scale_between(reference(), x); }

Integral Diffusion::speed_measure(double lo, double hi) const {
    if (!(lo >= 0.0) || !(hi >= lo)) throw DomainError("speed_measure requires 0 <= lo <= hi");
    if (lo == hi) return {};
    if (state_->closed_forms) return {speed_moment(0, lo, hi), 0.0, true, 0};
    return speed_integral([](double) { return 1.0; }, lo, hi);
}

Integral Diffusion::speed_integral(const Integrand& h, double lo, double hi) const {
    if (!(lo >= 0.0) || !(hi >= lo)) throw DomainError("speed_integral requires 0 <= lo <= hi");
    if (lo == hi) return {};
    const auto f = [&](double u) {
        const double hv = h(u);
        return hv == 0.0 ? 0.0 : hv * speed_density(u);
    };
    return integrate_range(f, lo, hi, state_->tol);
}

double Diffusion::speed_moment(int power, double lo, double hi) const {
    if (power < 0 || power > 2) throw DomainError("speed_moment supports powers 0, 1, 2");
    if (!(lo >= 0.0) || !(hi >= lo)) throw DomainError("speed_moment requires 0 <= lo <= hi");
    if (lo == hi) return 0.0;
    if (!state_->closed_forms) {
        const Integral r = speed_integral([power](double u) { return std::pow(u, power); }, lo, hi);
        if (!r.converged) throw DomainError("speed moment integral diverges");
        return r.value;
    }
    // ∫ u^j m = C ρ^{-(k+j)} [γ(k+j, ρ hi) - γ(k+j, ρ lo)],  k = -2q,  C = (2/β²) a^{2q-1} e^{ρ a}.
    const auto& p = *state_->logistic;
    const double rho = p.rho();
    const double shape = -2.0 * p.q + power;
    const double a = state_->a;
    const double log_scale = std::log(2.0 / (p.beta * p.beta)) + (2.0 * p.q - 1.0) * std::log(a) + rho * a -
                             shape * std::log(rho) + boost::math::lgamma(shape);
    const double xl = rho * lo;
    const double xh = std::isinf(hi) ? std::numeric_limits<double>::infinity() : rho * hi;
    double frac;
    if (xl > shape) {
        const double ql = boost::math::gamma_q(shape, xl);
        const double qh = std::isinf(xh) ? 0.0 : boost::math::gamma_q(shape, xh);
        frac = ql - qh;
    } else {
        const double ph = std::isinf(xh) ? 1.0 : boost::math::gamma_p(shape, xh);
        const double pl = xl == 0.0 ? 0.0 : boost::math::gamma_p(shape, xl);
        frac = ph - pl;
    }
    return std::exp(log_scale) * frac;
}

std::optional<double> drift_turning_point(const Diffusion& model) {
    if (model.has_closed_forms()) {
        const auto& p = *model.logistic_params();
        return p.growth() / (2.0 * p.b);
    }
    constexpr int n = 400;
    const double lo = 1e-3 * model.y0();
    const double hi = 1e3 * model.y0();
    std::vector<double> xs(n), mu(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
        mu[i] = model.drift(xs[i]);
    }
    const auto top = std::max_element(mu.begin(), mu.end()) - mu.begin();
    if (top == 0 || top == n - 1) return std::nullopt;
    const auto neg = [&](double x) { return -model.drift(x); };
    return boost::math::tools::brent_find_minima(neg, xs[top - 1], xs[top + 1], 40).first;
}

AssumptionReport validate_assumptions(const Diffusion& model) {
    AssumptionReport r;
    const double y0 = model.y0();

    const auto safe = [](auto&& fn) -> Integral {
        try {
            return fn();
        } catch (const std::exception&) {
            return {kNaN, kNaN, false, 0};
        }
    };

    const Integral mass = safe([&] { return model.speed_integral([](double) { return 1.0; }, 0.0, INFINITY); });
    r.speed_mass = mass.value;
    r.speed_mass_finite = mass.converged && std::isfinite(mass.value);
    const Integral first = safe([&] { return model.speed_integral([](double u) { return u; }, 0.0, INFINITY); });
    r.first_moment = first.value;
    r.first_moment_finite = first.converged && std::isfinite(first.value);

    r.drift_turning_point = drift_turning_point(model);
    if (r.drift_turning_point) {
        const double y1 = *r.drift_turning_point;
        bool shape_ok = true;
        const double step = std::pow(1e6, 1.0 / 400.0);
        double x_prev = 1e-3 * y0;
        double m_prev = model.drift(x_prev);
        for (int i = 1; i <= 400; ++i) {
            const double x = x_prev * step;
            const double m = model.drift(x);
            if (x <= y1) shape_ok = shape_ok && m >= m_prev - 1e-12 * std::abs(m_prev);
            if (x_prev >= y1) shape_ok = shape_ok && m < m_prev;
            x_prev = x;
            m_prev = m;
        }
        r.turning_point_ok = shape_ok;
        r.turning_point_above_y0 = y1 >= y0;
    }

    // s at geometrically growing x.
    r.scale_probe_x = y0;
    r.scale_probe_value = 0.0;
    for (int k = 0; k <= 40; ++k) {
        const double x = y0 * std::ldexp(1.0, k);
        double s;
        try {
            s = model.scale_density(x);
        } catch (const DomainError&) {
            r.scale_diverges = true;  // exp overflow: s left double range
            r.scale_probe_x = x;
            r.scale_probe_value = INFINITY;
            break;
        }
        r.scale_probe_x = x;
        r.scale_probe_value = s;
        if (s > 1e12) {
            r.scale_diverges = true;
            break;
        }
    }

    // ∫_0^x (S(x)-S(y)) M(dy) = ∫_0^x s(v) M[0,v] dv at x = y0.
    const auto inner = [&](double v) {
        const Integral mv = model.speed_measure(0.0, v);
        return model.scale_density(v) * mv.value;
    };
    const Integral entrance = safe([&] { return integrate_from_zero(inner, y0, model.tolerance()); });
    r.entrance_integral = entrance.value;
    r.entrance_refinements = entrance.refinements;
    r.entrance_boundary = entrance.converged && std::isfinite(entrance.value);
    return r;
}

}  // namespace mfharvest

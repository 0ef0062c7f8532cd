#include "mfharvest/impulse.hpp"

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfharvest/errors.hpp"

namespace mfharvest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kBrentBits = 30;

// Evaluates fn, mapping overflow/domain failures to NaN so callers can shrink a step.
template <class Fn>
double guarded(Fn&& fn) {
    try {
        const double v = fn();
        return std::isfinite(v) ? v : kNaN;
    } catch (const OverflowError&) {
        return kNaN;
    } catch (const DomainError&) {
        return kNaN;
    }
}

struct Maximum {
    double x;
    double value;
    int iterations;
};

template <class Fn>
Maximum maximize(Fn&& fn, double lo, double hi) {
    std::uintmax_t iters = 200;
    const auto neg = [&](double y) {
        const double v = fn(y);
        return std::isfinite(v) ? -v : std::numeric_limits<double>::max();
    };
    const auto r = boost::math::tools::brent_find_minima(neg, lo, hi, kBrentBits, iters);
    return {r.first, -r.second, static_cast<int>(iters)};
}

}  // namespace

double first_order_residual(const HittingTimes& ht, double K_tilde, double y) {
    return ht.xi(y) - (y - ht.y0() - K_tilde) * ht.xi_prime(y);
}

ThresholdSolution optimal_threshold_basic(const HittingTimes& ht, double K_tilde, RootOptions opts) {
    if (!(K_tilde >= 0.0) || !std::isfinite(K_tilde)) throw DomainError("K_tilde must be finite and >= 0");
    const double y0 = ht.y0();
    const double lo = std::max(y0 + K_tilde, ht.y2());
    const auto F = [&](double y) { return guarded([&] { return first_order_residual(ht, K_tilde, y); }); };

    ThresholdSolution sol;
    double a = lo + 1e-6;
    const double fa = F(a);
    if (!(fa > 0.0)) {
        // k decreases from the start: only possible for K̃ = 0 with ξ convex on [y0, ∞).
        sol.threshold = lo;
        sol.at_lower_bound = true;
        sol.value = lo == y0 ? 1.0 / ht.xi_prime(y0) : (lo - y0 - K_tilde) / ht.xi(lo);
        sol.bracket_lo = sol.bracket_hi = lo;
        sol.residual = 0.0;
        sol.profitable = sol.value > 0.0;
        return sol;
    }
    double b = 2.0 * a;
    double fb = F(b);
    int doublings = 0;
    int shrinks = 0;
    while (!(fb <= 0.0)) {
        if (std::isnan(fb)) {
            // Evaluation left double range before a sign change: pull back towards a.
            if (++shrinks > 60) throw NoRootError("first-order condition not evaluable beyond y = " + std::to_string(a));
            b = 0.5 * (a + b);
        } else {
            if (++doublings > opts.max_doublings)
                throw NoRootError("bracket expansion exhausted without a sign change");
            a = b;
            b *= 2.0;
        }
        fb = F(b);
    }
    sol.bracket_lo = a;
    sol.bracket_hi = b;

    int it = 0;
    double y = 0.5 * (a + b);
    for (; it < opts.max_iterations; ++it) {
        y = 0.5 * (a + b);
        const double fy = F(y);
        if (std::isnan(fy)) throw ConvergenceError("first-order condition not finite inside the bracket");
        const bool narrow = b - a < opts.width_rel * y;
        const bool small = std::abs(fy) < opts.residual_rel * ht.xi(y);
        if ((narrow && small) || b - a <= 4.0 * std::numeric_limits<double>::epsilon() * y) break;
        (fy > 0.0 ? a : b) = y;
    }
    sol.threshold = y;
    sol.iterations = it;
    const double xi = ht.xi(y);
    sol.residual = first_order_residual(ht, K_tilde, y) / xi;
    sol.value = (y - y0 - K_tilde) / xi;
    sol.profitable = sol.value > 0.0;
    return sol;
}

double AuxiliaryProblem::running_cost(const HittingTimes& ht, double x, double b, double extra_rate) const {
    if (cost) {
        const auto h = [&](double u) { return cost(u) + extra_rate; };
        return ht.expected_running_cost(h, x, b);
    }
    LinearCost h = linear_cost;
    h.constant += extra_rate;
    return ht.expected_running_cost(h, x, b);
}

double AuxiliaryProblem::ratio(const HittingTimes& ht, double y) const {
    const double y0 = ht.y0();
    return (reward(y) - K - running_cost(ht, y0, y)) / ht.xi(y);
}

ThresholdSolution solve_auxiliary(const HittingTimes& ht, const AuxiliaryProblem& problem) {
    if (!problem.reward) throw DomainError("auxiliary problem needs a reward function");
    const double y0 = ht.y0();
    const double d = 1e-3 * y0;
    const double step = std::pow(2.0, 0.125);
    const auto R = [&](double y) { return guarded([&] { return problem.ratio(ht, y); }); };

    std::vector<double> ys;
    std::vector<double> rs;
    int best = -1;
    for (int j = 0; j < 480; ++j) {
        const double y = y0 + d * std::pow(step, j);
        const double r = R(y);
        if (std::isnan(r)) break;
        ys.push_back(y);
        rs.push_back(r);
        if (best < 0 || r > rs[static_cast<std::size_t>(best)]) best = j;
        if (j - best >= 16) break;
    }
    if (best < 0) throw ConvergenceError("auxiliary objective could not be evaluated above y0");
    if (best == static_cast<int>(ys.size()) - 1)
        throw NoRootError("auxiliary objective still increasing at the end of the scan");

    const double lo = best == 0 ? y0 + 1e-9 * y0 : ys[static_cast<std::size_t>(best - 1)];
    const double hi = ys[static_cast<std::size_t>(best + 1)];
    const Maximum m = maximize(R, lo, hi);

    ThresholdSolution sol;
    sol.threshold = m.x;
    sol.value = m.value;
    sol.bracket_lo = lo;
    sol.bracket_hi = hi;
    sol.iterations = m.iterations;
    const double h = 1e-4 * m.x;
    sol.residual = (R(m.x + h) - R(m.x - h)) / (2.0 * h) * m.x;
    sol.profitable = m.value > 0.0;
    sol.at_lower_bound = best == 0;
    return sol;
}

ThresholdSolution best_response(const HittingTimes& ht, double K, double price, RootOptions opts) {
    if (!(price > 0.0) || !std::isfinite(price)) {
        std::ostringstream os;
        os << "price phi(z) = " << price << " must be positive";
        throw DomainError(os.str());
    }
    ThresholdSolution sol = optimal_threshold_basic(ht, K / price, opts);
    sol.value *= price;
    return sol;
}

double max_harvest_rate(const HittingTimes& ht) { return optimal_threshold_basic(ht, 0.0).value; }

StoppingValue stopping_value(const HittingTimes& ht, const AuxiliaryProblem& problem, double rho_star,
                             double y_star, int points) {
    if (points < 2) throw DomainError("stopping_value needs at least 2 grid points");
    const double y0 = ht.y0();
    StoppingValue out;
    out.rho_star = rho_star;

    const auto solve_at = [&](double x) -> std::pair<double, double> {
        const double lo = std::max(x, y0);
        const double hi = std::max(3.0 * y_star, 2.0 * lo);
        const auto phi = [&](double y) {
            return guarded([&] { return problem.reward(y) - problem.K - problem.running_cost(ht, x, y, rho_star); });
        };
        const Maximum m = maximize(phi, lo, hi);
        const double at_lo = phi(lo);
        if (x >= y0 && at_lo >= m.value) return {at_lo, lo};
        return {m.value, m.x};
    };

    const double gx_lo = 1e-2 * y0;
    const double gx_hi = 1.5 * y_star;
    out.x.resize(static_cast<std::size_t>(points));
    out.g.resize(out.x.size());
    out.argmax.resize(out.x.size());
    for (int i = 0; i < points; ++i) {
        const double x = gx_lo * std::pow(gx_hi / gx_lo, static_cast<double>(i) / (points - 1));
        const auto [g, arg] = solve_at(x);
        out.x[static_cast<std::size_t>(i)] = x;
        out.g[static_cast<std::size_t>(i)] = g;
        out.argmax[static_cast<std::size_t>(i)] = arg;
    }
    const auto [g0, arg0] = solve_at(y0);
    out.g_at_y0 = g0;
    out.stopping_threshold = arg0;
    return out;
}

VerificationReport verify_solution(const HittingTimes& ht, const ThresholdSolution& solution,
                                   const AuxiliaryProblem& problem, double tol, int points) {
    VerificationReport rep;
    rep.tolerance = tol;
    rep.stopping = stopping_value(ht, problem, solution.value, solution.threshold, points);
    const StoppingValue& sv = rep.stopping;
    rep.g_y0 = sv.g_at_y0;

    rep.min_g_minus_payoff = std::numeric_limits<double>::infinity();
    rep.max_u = -std::numeric_limits<double>::infinity();
    // u(x, y0) is defined for x >= y0 only; below y0 immediate stopping is not admissible.
    for (std::size_t i = 0; i < sv.x.size(); ++i) {
        if (sv.x[i] < ht.y0()) continue;
        const double payoff = problem.reward(sv.x[i]) - problem.K;
        rep.min_g_minus_payoff = std::min(rep.min_g_minus_payoff, sv.g[i] - payoff);
        rep.max_u = std::max(rep.max_u, payoff - sv.g[i] + rep.g_y0);
    }

    // g at the threshold itself, not a grid neighbour.
    const double y = solution.threshold;
    const double y0 = ht.y0();
    const double hi = std::max(3.0 * y, 2.0 * y);
    const auto phi = [&](double b) {
        return guarded([&] { return problem.reward(b) - problem.K - problem.running_cost(ht, y, b, solution.value); });
    };
    const Maximum m = maximize(phi, std::max(y, y0), hi);
    const double g_y = std::max(m.value, phi(std::max(y, y0)));
    rep.u_at_threshold = problem.reward(y) - problem.K - g_y + rep.g_y0;
    rep.ratio_gap = solution.value - problem.ratio(ht, y);

    rep.g_y0_ok = std::abs(rep.g_y0) <= tol;
    rep.dominates_payoff = rep.min_g_minus_payoff >= -tol;
    rep.u_nonpositive = rep.max_u <= tol;
    rep.threshold_tight = std::abs(rep.u_at_threshold) <= tol;
    rep.ratio_consistent = std::abs(rep.ratio_gap) <= tol * std::max(1.0, std::abs(solution.value));
    return rep;
}

}  // namespace mfharvest

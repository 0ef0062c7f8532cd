#pragma once

#include <vector>

#include "mfharvest/hitting.hpp"

namespace mfharvest {

/// Solver output for one threshold problem.
struct ThresholdSolution {
    double threshold = 0.0;   // y*
    double value = 0.0;       // long-run average reward ρ*
    double residual = 0.0;    // first-order condition at y*, relative to ξ(y*)
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int iterations = 0;
    bool profitable = true;        // false when the best ratio is <= 0
    bool at_lower_bound = false;   // sup attained only in the limit y -> bracket_lo
};

struct RootOptions {
    double residual_rel = 1e-10;  // |F| < residual_rel * ξ(y)
    double width_rel = 1e-9;      // bracket width < width_rel * y
    int max_doublings = 60;
    int max_iterations = 200;
};

/// Maximiser of k(y) = (y - y0 - K̃)/ξ(y): the root of F̃(y) = ξ - (y - y0 - K̃) ξ'
/// on [max(y0 + K̃, y2), ∞). Throws NoRootError after `max_doublings` expansions.
ThresholdSolution optimal_threshold_basic(const HittingTimes& ht, double K_tilde, RootOptions opts = {});

/// F̃_{K̃}(y).
double first_order_residual(const HittingTimes& ht, double K_tilde, double y);

/// sup over y of (f(y) - K - E_{y0}∫_0^{τ_y} h)/ξ(y).
///
/// `cost` may be left empty, in which case the linear cost is used (closed form
/// for logistic models).
struct AuxiliaryProblem {
    Integrand reward;        // f: increasing, f(y0) = 0
    LinearCost linear_cost;  // h when `cost` is empty
    Integrand cost;          // general h >= 0
    double K = 1.0;

    [[nodiscard]] double running_cost(const HittingTimes& ht, double x, double b, double extra_rate = 0.0) const;
    [[nodiscard]] double ratio(const HittingTimes& ht, double y) const;
};

/// Log-spaced scan from y0 outwards until the ratio has clearly peaked, then Brent
/// refinement. `profitable` is false if the best ratio is negative.
ThresholdSolution solve_auxiliary(const HittingTimes& ht, const AuxiliaryProblem& problem);

/// Optimal threshold against a fixed price φ(z) = `price`: ŷ_{K/price}, value scaled by price.
/// Throws DomainError unless price > 0.
ThresholdSolution best_response(const HittingTimes& ht, double K, double price, RootOptions opts = {});

/// (ŷ0 - y0)/ξ(ŷ0).
double max_harvest_rate(const HittingTimes& ht);

struct StoppingValue {
    std::vector<double> x;
    std::vector<double> g;
    std::vector<double> argmax;  // maximising threshold per grid point
    double rho_star = 0.0;
    double g_at_y0 = 0.0;
    double stopping_threshold = 0.0;  // argmax for x = y0
};

/// g(x) = max over y >= max(x, y0) of f(y) - K - E_x∫_0^{τ_y}(h + ρ*), immediate
/// stopping included. Grid: `points` log-spaced on [1e-2 y0, 1.5 y_star].
StoppingValue stopping_value(const HittingTimes& ht, const AuxiliaryProblem& problem, double rho_star,
                             double y_star, int points = 400);

struct VerificationReport {
    StoppingValue stopping;
    double g_y0 = 0.0;              // should be 0
    double min_g_minus_payoff = 0.0;  // min over grid x >= y0 of g - (f - K), should be >= 0
    double max_u = 0.0;             // max over grid x >= y0 of u(x, y0), should be <= 0
    double u_at_threshold = 0.0;    // u(y*, y0), should be 0
    double ratio_gap = 0.0;         // reported value minus ratio recomputed at the threshold
    double tolerance = 1e-6;
    bool g_y0_ok = false;
    bool dominates_payoff = false;
    bool u_nonpositive = false;
    bool threshold_tight = false;
    bool ratio_consistent = false;

    [[nodiscard]] bool passed() const noexcept {
        return g_y0_ok && dominates_payoff && u_nonpositive && threshold_tight && ratio_consistent;
    }
};

/// Numeric form of the verification conditions with u(x, y0) = f(x) - K - g(x) + g(y0).
VerificationReport verify_solution(const HittingTimes& ht, const ThresholdSolution& solution,
                                   const AuxiliaryProblem& problem, double tol = 1e-6, int points = 400);

}  // namespace mfharvest

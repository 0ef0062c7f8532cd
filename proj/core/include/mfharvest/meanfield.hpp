#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mfharvest/impulse.hpp"
#include "mfharvest/payoff.hpp"
#include "mfharvest/stationary.hpp"

namespace mfharvest {

struct MeanFieldOptions {
    double fixed_point_tol = 1e-8;  // |Φ(y) - y|
    int max_bisections = 200;
    int scan_points = 500;          // expected-stock equilibrium scan
    int mfc_points = 500;
    double stability_step = 1e-3;   // relative FD step for Φ'
    double marginal_band = 1e-3;
    double tie_tol = 1e-6;
    unsigned threads = 0;
};

struct PhiResult {
    double threshold = 0.0;
    double level = 0.0;          // c(y) as computed
    double used_level = 0.0;     // after clamping to the φ domain
    bool clamped = false;
    double value = 0.0;          // best-response long-run reward at used_level
};

struct StabilityReport {
    bool stable = false;
    bool marginal = false;
    double derivative = 0.0;         // Φ'(y*)
    bool iteration_converges = false;  // 5 Φ-iterations from y*(1 ± 2%) move towards y*
    double distance_below = 0.0;     // |y_5 - y*| started below
    double distance_above = 0.0;
    [[nodiscard]] bool consistent() const noexcept { return stable == iteration_converges; }
};

struct Equilibrium {
    double threshold = 0.0;
    double value = 0.0;
    double level = 0.0;
    double residual = 0.0;  // |Φ(y) - y|
    StabilityReport stability;
};

struct EquilibriumSet {
    Interaction interaction = Interaction::HarvestRate;
    std::vector<Equilibrium> points;  // ascending threshold
    double search_lo = 0.0;
    double search_hi = 0.0;
    int evaluations = 0;
    std::string diagnostic;  // set when no fixed point was found
};

struct MfcSolution {
    double threshold = 0.0;
    double value = 0.0;
    double level = 0.0;
    bool tie = false;               // several grid-local maxima within tie_tol
    std::vector<double> tied_thresholds;
    bool degenerate = false;        // best H negative
    double grid_lo = 0.0;
    double grid_hi = 0.0;
};

struct ComparisonReport {
    EquilibriumSet mfg;
    MfcSolution mfc;
    std::vector<double> margins;  // harvest rate: y^p - y^g; expected stock: y^g - y^p
    double worst_margin = 0.0;
    double tolerance = 1e-6;
    [[nodiscard]] bool holds() const noexcept { return !mfg.points.empty() && worst_margin >= -tolerance; }
};

/// A population of identical agents facing the payoff (y - y0) φ(z) - K per impulse.
class MeanFieldProblem {
public:
    MeanFieldProblem(Diffusion model, PayoffSpec payoff, MeanFieldOptions opts = {});

    [[nodiscard]] const HittingTimes& hitting() const noexcept { return hitting_; }
    [[nodiscard]] const Stationary& stationary() const noexcept { return stationary_; }
    [[nodiscard]] const PayoffSpec& payoff() const noexcept { return payoff_; }
    [[nodiscard]] const MeanFieldOptions& options() const noexcept { return opts_; }

    /// ŷ0 and (ŷ0 - y0)/ξ(ŷ0).
    [[nodiscard]] double yhat0() const noexcept { return yhat0_; }
    [[nodiscard]] double max_rate() const noexcept { return max_rate_; }
    /// [0, max rate] or [z1, z2].
    [[nodiscard]] std::pair<double, double> phi_domain() const noexcept { return domain_; }
    /// φ sampled on 200 domain points is strictly decreasing.
    [[nodiscard]] bool phi_strictly_decreasing() const noexcept { return phi_decreasing_; }

    /// c(y): (y - y0)/ξ(y) or E[X_∞^{R(y)}].
    [[nodiscard]] double interaction_level(double y) const;
    [[nodiscard]] ThresholdSolution best_response(double z) const;
    [[nodiscard]] PhiResult phi_map(double y) const;
    /// (best response at the lower domain end, at the upper end).
    [[nodiscard]] std::pair<double, double> critical_bounds() const;
    /// J(R(y), R(y)) = (φ(c(y))(y - y0) - K)/ξ(y), the MFC objective H.
    [[nodiscard]] double population_value(double y) const;
    /// Long-run reward of threshold y against a fixed level z.
    [[nodiscard]] double reward_against(double y, double z) const;

    [[nodiscard]] EquilibriumSet mfg_equilibrium() const;
    [[nodiscard]] StabilityReport classify_stability(double y_star) const;
    [[nodiscard]] MfcSolution mfc_optimum() const;
    [[nodiscard]] ComparisonReport compare() const;

    /// Upper end of the expected-stock scan: max(20 ŷ0, first y with c(y) > 0.999 z2).
    [[nodiscard]] double scan_cap() const;

private:
    [[nodiscard]] double psi(double y) const { return phi_map(y).threshold - y; }
    [[nodiscard]] Equilibrium make_equilibrium(double y) const;

    HittingTimes hitting_;
    Stationary stationary_;
    PayoffSpec payoff_;
    MeanFieldOptions opts_;
    double yhat0_ = 0.0;
    double max_rate_ = 0.0;
    std::pair<double, double> domain_;
    bool phi_decreasing_ = false;
};

/// Randomised logistic parameter sweep for the ordering theorems.
struct SweepConfig {
    int draws = 100;
    std::uint64_t seed = 20240611;
    Interaction interaction = Interaction::HarvestRate;
    std::string phi = "1/(1+z)";
    double q_lo = -2.0, q_hi = -0.2;
    double b_lo = 0.2, b_hi = 1.0;
    double K_lo = 0.5, K_hi = 2.0;
    double beta = 1.0;
    double y0 = 1.0;
    unsigned threads = 0;
};

struct SweepRow {
    int index = 0;
    double q = 0.0, b = 0.0, K = 0.0;
    std::vector<double> y_g;
    std::vector<double> value_g;
    double y_p = 0.0;
    double value_p = 0.0;
    double margin = 0.0;  // worst ordering margin
    bool holds = false;
    std::string error;
};

std::vector<SweepRow> run_sweep(const SweepConfig& config);

}  // namespace mfharvest

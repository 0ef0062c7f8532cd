#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mfharvest/diffusion.hpp"
#include "mfharvest/payoff.hpp"

namespace mfharvest {

struct SimConfig {
    double dt = 1e-3;
    std::uint64_t seed = 42;
    double positivity_floor = 1e-8;
    /// Brownian-bridge test for crossings between grid points. Off: crossing is
    /// detected at grid times only and the first grid value >= y is recorded.
    bool bridge = true;
    double max_path_time = 1e4;  // hitting-time estimator cap per path
    double horizon = 1e5;        // long-run estimators: total simulated time
    int segments = 8;            // independent regenerative segments sharing the horizon
    double burn_in = -1.0;       // per segment; negative: 10 ξ(y)
    unsigned threads = 0;
};

/// Independent stream seed for path/segment `index` (splitmix64 of the pair).
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept;

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
    std::int64_t samples = 0;      // paths or regenerative cycles
    std::int64_t capped = 0;
    std::int64_t floor_hits = 0;
    std::int64_t impulses = 0;
    double simulated_time = 0.0;
    bool flagged = false;          // more than 0.1% of paths hit the cap

    [[nodiscard]] double z_score(double reference) const { return se > 0.0 ? (mean - reference) / se : 0.0; }
};

struct PathRecord {
    std::vector<double> times;
    std::vector<double> states;
    std::vector<double> impulse_times;
    std::vector<double> pre_impulse_states;
    double cumulative_reward = 0.0;
    std::int64_t floor_hits = 0;
};

/// Reward per impulse: price (X_{τ-} - y0) - K.
struct ImpulseReward {
    double price = 1.0;
    double K = 0.0;
};

/// Controlled path on [0, horizon] from y0 with threshold y (+inf: no impulses).
/// Every `stride`-th grid state is recorded, plus the pre/post states at impulses.
PathRecord simulate_path(const Diffusion& model, double y, double horizon, const SimConfig& config,
                         int stride = 1, ImpulseReward reward = {});

/// E_{y0}[τ_y] from `paths` independent paths.
Estimate estimate_hitting_time(const Diffusion& model, double y, std::int64_t paths, const SimConfig& config);

/// E_x[∫_0^{τ_b} h(X_s) ds].
Estimate estimate_running_cost(const Diffusion& model, const std::function<double(double)>& h, double x, double b,
                               std::int64_t paths, const SimConfig& config);

/// Long-run average of Σ (γ(X_{τ-}, z) - K) under R(y). Without `z` the level is
/// the analytic c(y) (self-consistent J(R(y), R(y))).
Estimate estimate_value(const Diffusion& model, const PayoffSpec& payoff, double y, std::optional<double> z,
                        const SimConfig& config);

/// Long-run mean stock under R(y).
Estimate estimate_stationary_mean(const Diffusion& model, double y, const SimConfig& config);

/// Long-run mean of the diffusion reflected downwards at y0 (batch means over the horizon).
Estimate estimate_reflected_mean(const Diffusion& model, const SimConfig& config);

/// Fraction of time spent in each bin [edges[i], edges[i+1]) under R(y).
std::vector<Estimate> estimate_occupation(const Diffusion& model, double y, const std::vector<double>& edges,
                                          const SimConfig& config);

/// CSV with header `t,x,impulse`.
void write_path_csv(std::ostream& os, const PathRecord& path);

}  // namespace mfharvest

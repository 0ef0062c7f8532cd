#include "mfharvest/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

#include "mfharvest/errors.hpp"
#include "mfharvest/hitting.hpp"
#include "mfharvest/meanfield.hpp"
#include "mfharvest/parallel.hpp"

namespace mfharvest {

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(master) ^ index);
}

namespace {

class Stepper {
public:
    Stepper(const Diffusion& model, const SimConfig& cfg, std::uint64_t seed)
        : model_(model), dt_(cfg.dt), sqrt_dt_(std::sqrt(cfg.dt)), floor_(cfg.positivity_floor),
          bridge_(cfg.bridge), rng_(seed) {}

    double step(double x) {
        double next = x + model_.drift(x) * dt_ + model_.volatility(x) * sqrt_dt_ * normal_(rng_);
        if (!(next > floor_)) {
            next = floor_;
            ++floor_hits;
        }
        return next;
    }

    /// Did the path cross y during the step x -> next? Sets *pre to the recorded pre-impulse state.
    bool crossed(double x, double next, double y, double* pre) {
        if (next >= y) {
            *pre = bridge_ ? y : next;
            return true;
        }
        if (!bridge_) return false;
        const double s = model_.volatility(x);
        const double arg = 2.0 * (y - x) * (y - next) / (s * s * dt_);
        if (arg > 50.0) return false;
        if (uniform_(rng_) < std::exp(-arg)) {
            *pre = y;
            return true;
        }
        return false;
    }

    [[nodiscard]] double dt() const noexcept { return dt_; }
    std::int64_t floor_hits = 0;

private:
    const Diffusion& model_;
    double dt_;
    double sqrt_dt_;
    double floor_;
    bool bridge_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_;
    std::uniform_real_distribution<double> uniform_;
};

void validate(const SimConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw DomainError("dt must be positive");
    if (!(cfg.horizon > 0.0)) throw DomainError("horizon must be positive");
    if (cfg.segments < 1) throw DomainError("segments must be >= 1");
}

struct Cycle {
    double length;
    double pre_state;
    double stock_integral;
};

// One regenerative segment: cycles started after `burn_in` and completed before `horizon`.
// `on_step(x, dt)` sees every step of the kept cycles; `on_cycle_end()` closes them.
template <class OnStep, class OnCycle>
std::int64_t run_segment(const Diffusion& model, double y, const SimConfig& cfg, std::uint64_t seed, double horizon,
                         double burn_in, OnStep&& on_step, OnCycle&& on_cycle, std::int64_t* impulses) {
    Stepper st(model, cfg, seed);
    const double y0 = model.y0();
    const double dt = st.dt();
    const auto steps = static_cast<std::int64_t>(std::ceil(horizon / dt));
    double x = y0;
    double cycle_start = 0.0;
    double integral = 0.0;
    for (std::int64_t n = 0; n < steps; ++n) {
        const double t_next = static_cast<double>(n + 1) * dt;
        const bool keep = cycle_start >= burn_in;
        if (keep) {
            on_step(x, dt);
            integral += x * dt;
        }
        const double next = st.step(x);
        double pre = 0.0;
        if (st.crossed(x, next, y, &pre)) {
            ++*impulses;
            if (keep) on_cycle(Cycle{t_next - cycle_start, pre, integral});
            integral = 0.0;
            cycle_start = t_next;
            x = y0;
        } else {
            x = next;
        }
    }
    return st.floor_hits;
}

struct RatioSums {
    double num = 0.0;
    double den = 0.0;
};

// Ratio estimator Σa/Σl with delta-method standard error.
Estimate ratio_estimate(const std::vector<double>& a, const std::vector<double>& l) {
    Estimate e;
    const auto n = static_cast<std::int64_t>(a.size());
    e.samples = n;
    if (n < 2) {
        e.mean = std::numeric_limits<double>::quiet_NaN();
        e.se = std::numeric_limits<double>::infinity();
        return e;
    }
    RatioSums s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s.num += a[i];
        s.den += l[i];
    }
    e.mean = s.num / s.den;
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - e.mean * l[i];
        ss += d * d;
    }
    e.se = std::sqrt(ss * static_cast<double>(n) / static_cast<double>(n - 1)) / s.den;
    return e;
}

Estimate mean_estimate(const std::vector<double>& v) {
    Estimate e;
    const auto n = static_cast<std::int64_t>(v.size());
    e.samples = n;
    if (n < 2) {
        e.mean = std::numeric_limits<double>::quiet_NaN();
        e.se = std::numeric_limits<double>::infinity();
        return e;
    }
    double sum = 0.0;
    for (double x : v) sum += x;
    e.mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double x : v) ss += (x - e.mean) * (x - e.mean);
    e.se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    return e;
}

double burn_in_for(const Diffusion& model, double y, const SimConfig& cfg) {
    if (cfg.burn_in >= 0.0) return cfg.burn_in;
    return 10.0 * HittingTimes(model).xi(y);
}

// Runs all segments and returns their kept cycles in segment order.
struct CycleRun {
    std::vector<std::vector<Cycle>> cycles;
    std::int64_t floor_hits = 0;
    std::int64_t impulses = 0;
    double simulated_time = 0.0;
};

template <class MakeStep>
CycleRun run_cycles(const Diffusion& model, double y, const SimConfig& cfg, MakeStep&& make_step) {
    validate(cfg);
    if (!(y > model.y0())) throw DomainError("threshold must exceed y0");
    const double burn = burn_in_for(model, y, cfg);
    const double seg_horizon = cfg.horizon / cfg.segments;
    CycleRun run;
    run.cycles.resize(static_cast<std::size_t>(cfg.segments));
    std::vector<std::int64_t> floors(run.cycles.size()), impulses(run.cycles.size());
    parallel_for(
        run.cycles.size(),
        [&](std::size_t s) {
            auto on_step = make_step(s);
            auto& out = run.cycles[s];
            floors[s] = run_segment(model, y, cfg, stream_seed(cfg.seed, s), seg_horizon, burn, on_step,
                                    [&](const Cycle& c) { out.push_back(c); }, &impulses[s]);
        },
        cfg.threads);
    for (std::size_t s = 0; s < run.cycles.size(); ++s) {
        run.floor_hits += floors[s];
        run.impulses += impulses[s];
    }
    run.simulated_time = cfg.horizon;
    return run;
}

}  // namespace

PathRecord simulate_path(const Diffusion& model, double y, double horizon, const SimConfig& config, int stride,
                         ImpulseReward reward) {
    validate(config);
    if (!(y > model.y0())) throw DomainError("threshold must exceed y0");
    if (stride < 1) throw DomainError("stride must be >= 1");
    Stepper st(model, config, stream_seed(config.seed, 0));
    const double y0 = model.y0();
    const double dt = config.dt;
    const auto steps = static_cast<std::int64_t>(std::ceil(horizon / dt));
    PathRecord rec;
    double x = y0;
    rec.times.push_back(0.0);
    rec.states.push_back(x);
    for (std::int64_t n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n + 1) * dt;
        const double next = st.step(x);
        double pre = 0.0;
        if (std::isfinite(y) && st.crossed(x, next, y, &pre)) {
            rec.impulse_times.push_back(t);
            rec.pre_impulse_states.push_back(pre);
            rec.cumulative_reward += reward.price * (pre - y0) - reward.K;
            rec.times.push_back(t);
            rec.states.push_back(pre);
            rec.times.push_back(t);
            rec.states.push_back(y0);
            x = y0;
            continue;
        }
        x = next;
        if ((n + 1) % stride == 0) {
            rec.times.push_back(t);
            rec.states.push_back(x);
        }
    }
    rec.floor_hits = st.floor_hits;
    return rec;
}

Estimate estimate_running_cost(const Diffusion& model, const std::function<double(double)>& h, double x0, double b,
                               std::int64_t paths, const SimConfig& config) {
    validate(config);
    if (!(x0 > 0.0) || !(b > x0)) throw DomainError("running cost estimator requires 0 < x < b");
    if (paths < 2) throw DomainError("need at least 2 paths");
    std::vector<double> values(static_cast<std::size_t>(paths));
    std::vector<char> capped(values.size(), 0);
    std::vector<std::int64_t> floors(values.size(), 0);
    const auto cap_steps = static_cast<std::int64_t>(std::ceil(config.max_path_time / config.dt));
    parallel_for(
        values.size(),
        [&](std::size_t i) {
            Stepper st(model, config, stream_seed(config.seed, i));
            double x = x0;
            double acc = 0.0;
            double pre = 0.0;
            std::int64_t n = 0;
            for (; n < cap_steps; ++n) {
                acc += h(x) * config.dt;
                const double next = st.step(x);
                if (st.crossed(x, next, b, &pre)) break;
                x = next;
            }
            capped[i] = n == cap_steps;
            values[i] = acc;
            floors[i] = st.floor_hits;
        },
        config.threads);
    Estimate e = mean_estimate(values);
    for (std::size_t i = 0; i < values.size(); ++i) {
        e.capped += capped[i];
        e.floor_hits += floors[i];
    }
    e.flagged = static_cast<double>(e.capped) > 1e-3 * static_cast<double>(paths);
    return e;
}

Estimate estimate_hitting_time(const Diffusion& model, double y, std::int64_t paths, const SimConfig& config) {
    if (!(y > model.y0())) throw DomainError("threshold must exceed y0");
    return estimate_running_cost(model, [](double) { return 1.0; }, model.y0(), y, paths, config);
}

Estimate estimate_value(const Diffusion& model, const PayoffSpec& payoff, double y, std::optional<double> z,
                        const SimConfig& config) {
    const double level = z ? *z : MeanFieldProblem(model, payoff).interaction_level(y);
    const double price = payoff.phi(level);
    const double y0 = model.y0();
    CycleRun run = run_cycles(model, y, config, [](std::size_t) { return [](double, double) {}; });
    std::vector<double> rewards, lengths;
    for (const auto& seg : run.cycles)
        for (const auto& c : seg) {
            rewards.push_back(price * (c.pre_state - y0) - payoff.K);
            lengths.push_back(c.length);
        }
    Estimate e = ratio_estimate(rewards, lengths);
    e.floor_hits = run.floor_hits;
    e.impulses = run.impulses;
    e.simulated_time = run.simulated_time;
    return e;
}

Estimate estimate_stationary_mean(const Diffusion& model, double y, const SimConfig& config) {
    CycleRun run = run_cycles(model, y, config, [](std::size_t) { return [](double, double) {}; });
    std::vector<double> areas, lengths;
    for (const auto& seg : run.cycles)
        for (const auto& c : seg) {
            areas.push_back(c.stock_integral);
            lengths.push_back(c.length);
        }
    Estimate e = ratio_estimate(areas, lengths);
    e.floor_hits = run.floor_hits;
    e.impulses = run.impulses;
    e.simulated_time = run.simulated_time;
    return e;
}

std::vector<Estimate> estimate_occupation(const Diffusion& model, double y, const std::vector<double>& edges,
                                          const SimConfig& config) {
    if (edges.size() < 2) throw DomainError("occupation histogram needs at least one bin");
    const std::size_t bins = edges.size() - 1;
    // Per segment: time in each bin for the current cycle, flushed into per-cycle rows.
    std::vector<std::vector<double>> current(static_cast<std::size_t>(config.segments), std::vector<double>(bins, 0.0));
    std::vector<std::vector<std::vector<double>>> rows(static_cast<std::size_t>(config.segments));
    const auto bin_of = [&](double x) -> std::ptrdiff_t {
        if (x < edges.front() || x >= edges.back()) return -1;
        return std::upper_bound(edges.begin(), edges.end(), x) - edges.begin() - 1;
    };
    validate(config);
    if (!(y > model.y0())) throw DomainError("threshold must exceed y0");
    const double burn = burn_in_for(model, y, config);
    const double seg_horizon = config.horizon / config.segments;
    std::vector<std::vector<double>> lengths(rows.size());
    parallel_for(
        rows.size(),
        [&](std::size_t s) {
            auto& cur = current[s];
            std::int64_t impulses = 0;
            run_segment(
                model, y, config, stream_seed(config.seed, s), seg_horizon, burn,
                [&](double x, double dt) {
                    const auto k = bin_of(x);
                    if (k >= 0) cur[static_cast<std::size_t>(k)] += dt;
                },
                [&](const Cycle& c) {
                    rows[s].push_back(cur);
                    lengths[s].push_back(c.length);
                    std::fill(cur.begin(), cur.end(), 0.0);
                },
                &impulses);
        },
        config.threads);
    std::vector<double> all_lengths;
    for (const auto& l : lengths) all_lengths.insert(all_lengths.end(), l.begin(), l.end());
    std::vector<Estimate> out(bins);
    std::vector<double> a;
    a.reserve(all_lengths.size());
    for (std::size_t k = 0; k < bins; ++k) {
        a.clear();
        for (const auto& seg : rows)
            for (const auto& r : seg) a.push_back(r[k]);
        out[k] = ratio_estimate(a, all_lengths);
    }
    return out;
}

Estimate estimate_reflected_mean(const Diffusion& model, const SimConfig& config) {
    validate(config);
    const double y0 = model.y0();
    const double burn = config.burn_in >= 0.0 ? config.burn_in : 100.0;
    const double seg_horizon = config.horizon / config.segments;
    constexpr int kBatches = 25;
    const double batch_len = seg_horizon / kBatches;
    std::vector<std::vector<double>> means(static_cast<std::size_t>(config.segments));
    std::vector<std::int64_t> floors(means.size());
    parallel_for(
        means.size(),
        [&](std::size_t s) {
            Stepper st(model, config, stream_seed(config.seed, s));
            double x = y0;
            const auto burn_steps = static_cast<std::int64_t>(std::ceil(burn / config.dt));
            for (std::int64_t n = 0; n < burn_steps; ++n) {
                x = st.step(x);
                if (x > y0) x = 2.0 * y0 - x;
            }
            const auto per_batch = static_cast<std::int64_t>(std::ceil(batch_len / config.dt));
            for (int b = 0; b < kBatches; ++b) {
                double acc = 0.0;
                for (std::int64_t n = 0; n < per_batch; ++n) {
                    acc += x;
                    x = st.step(x);
                    if (x > y0) x = 2.0 * y0 - x;
                }
                means[s].push_back(acc / static_cast<double>(per_batch));
            }
            floors[s] = st.floor_hits;
        },
        config.threads);
    std::vector<double> all;
    for (const auto& m : means) all.insert(all.end(), m.begin(), m.end());
    Estimate e = mean_estimate(all);
    for (auto f : floors) e.floor_hits += f;
    e.simulated_time = config.horizon;
    return e;
}

void write_path_csv(std::ostream& os, const PathRecord& path) {
    os << "t,x,impulse\n" << std::setprecision(10);
    std::size_t k = 0;
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        // Pre-impulse rows are the ones matching the next recorded impulse time with x != y0.
        bool flag = false;
        if (k < path.impulse_times.size() && path.times[i] == path.impulse_times[k] &&
            path.states[i] == path.pre_impulse_states[k]) {
            flag = true;
            ++k;
        }
        os << path.times[i] << ',' << path.states[i] << ',' << (flag ? 1 : 0) << '\n';
    }
}

}  // namespace mfharvest

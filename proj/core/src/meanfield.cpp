#include "mfharvest/meanfield.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "mfharvest/errors.hpp"
#include "mfharvest/parallel.hpp"

namespace mfharvest {

namespace {

// Φ is compared against y at the 1e-8 level, so best responses are solved tighter
// than the single-agent default.
constexpr RootOptions kTightRoot{1e-12, 1e-12, 60, 200};
constexpr int kBrentBits = 30;

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return out;
}

}  // namespace

MeanFieldProblem::MeanFieldProblem(Diffusion model, PayoffSpec payoff, MeanFieldOptions opts)
    : hitting_(model), stationary_(hitting_), payoff_(std::move(payoff)), opts_(opts) {
    if (!payoff_.phi) throw DomainError("payoff needs a price function");
    const ThresholdSolution basic = optimal_threshold_basic(hitting_, 0.0, kTightRoot);
    yhat0_ = basic.threshold;
    max_rate_ = basic.value;
    domain_ = payoff_.interaction == Interaction::HarvestRate ? std::pair{0.0, max_rate_}
                                                              : stationary_.stock_bounds();
    phi_decreasing_ = true;
    double prev = payoff_.phi(domain_.first);
    for (int i = 1; i <= 200; ++i) {
        const double z = domain_.first + (domain_.second - domain_.first) * i / 200.0;
        const double v = payoff_.phi(z);
        phi_decreasing_ = phi_decreasing_ && v < prev;
        prev = v;
    }
}

double MeanFieldProblem::interaction_level(double y) const {
    const double y0 = hitting_.y0();
    if (!(y > y0)) throw DomainError("interaction level needs y > y0");
    if (payoff_.interaction == Interaction::HarvestRate) return (y - y0) / hitting_.xi(y);
    return stationary_.expected_stock(y);
}

ThresholdSolution MeanFieldProblem::best_response(double z) const {
    return mfharvest::best_response(hitting_, payoff_.K, payoff_.phi(z), kTightRoot);
}

PhiResult MeanFieldProblem::phi_map(double y) const {
    PhiResult r;
    r.level = interaction_level(y);
    r.used_level = std::clamp(r.level, domain_.first, domain_.second);
    r.clamped = r.used_level != r.level;
    const ThresholdSolution br = best_response(r.used_level);
    r.threshold = br.threshold;
    r.value = br.value;
    return r;
}

std::pair<double, double> MeanFieldProblem::critical_bounds() const {
    const double a = best_response(domain_.first).threshold;
    const double b = best_response(domain_.second).threshold;
    return {std::min(a, b), std::max(a, b)};
}

double MeanFieldProblem::reward_against(double y, double z) const {
    const double y0 = hitting_.y0();
    return (payoff_.phi(z) * (y - y0) - payoff_.K) / hitting_.xi(y);
}

double MeanFieldProblem::population_value(double y) const { return reward_against(y, interaction_level(y)); }

Equilibrium MeanFieldProblem::make_equilibrium(double y) const {
    Equilibrium e;
    const PhiResult p = phi_map(y);
    e.threshold = y;
    e.level = p.level;
    e.residual = std::abs(p.threshold - y);
    e.value = reward_against(y, p.used_level);
    e.stability = classify_stability(y);
    return e;
}

double MeanFieldProblem::scan_cap() const {
    double cap = 20.0 * yhat0_;
    if (payoff_.interaction == Interaction::ExpectedStock) {
        const double target = 0.999 * stationary_.uncontrolled_mean();
        // ŷ0 equals y0 when the rate (y - y0)/ξ(y) peaks only in the limit y -> y0.
        double y = std::max(yhat0_, hitting_.y0() * (1.0 + 1e-3));
        // Stop before ξ leaves double range.
        for (int i = 0; i < 60 && interaction_level(y) <= target; ++i) {
            const double next = 1.25 * y;
            try {
                (void)hitting_.xi(next);
            } catch (const std::exception&) {
                break;
            }
            y = next;
        }
        cap = std::max(cap, y);
    }
    return cap;
}

EquilibriumSet MeanFieldProblem::mfg_equilibrium() const {
    EquilibriumSet out;
    out.interaction = payoff_.interaction;
    const double tol = opts_.fixed_point_tol;

    const auto bisect = [&](double a, double b, double fa) {
        double y = 0.5 * (a + b);
        for (int i = 0; i < opts_.max_bisections; ++i) {
            y = 0.5 * (a + b);
            const double f = psi(y);
            ++out.evaluations;
            if (std::abs(f) < tol || b - a < 4.0 * std::numeric_limits<double>::epsilon() * b) break;
            if ((f > 0.0) == (fa > 0.0)) {
                a = y;
                fa = f;
            } else {
                b = y;
            }
        }
        return y;
    };

    if (payoff_.interaction == Interaction::HarvestRate) {
        const auto [lo, hi] = critical_bounds();
        out.search_lo = lo;
        out.search_hi = hi;
        const double flo = psi(lo);
        const double fhi = psi(hi);
        out.evaluations += 2;
        double y;
        if (std::abs(flo) < tol) {
            y = lo;
        } else if (std::abs(fhi) < tol) {
            y = hi;
        } else if (flo > 0.0 && fhi < 0.0) {
            y = bisect(lo, hi, flo);
        } else {
            std::ostringstream os;
            os << "psi has no sign change on the critical interval [" << lo << ", " << hi << "]: psi(lo)=" << flo
               << ", psi(hi)=" << fhi;
            out.diagnostic = os.str();
            return out;
        }
        out.points.push_back(make_equilibrium(y));
        return out;
    }

    const double y0 = hitting_.y0();
    const double lo = y0 * (1.0 + 1e-3);
    const double hi = scan_cap();
    out.search_lo = lo;
    out.search_hi = hi;
    const std::vector<double> ys = log_grid(lo, hi, std::max(opts_.scan_points, 2));
    std::vector<double> ps(ys.size());
    parallel_for(ys.size(), [&](std::size_t i) { ps[i] = psi(ys[i]); }, opts_.threads);
    out.evaluations += static_cast<int>(ys.size());

    std::vector<double> roots;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (ps[i] == 0.0) {
            roots.push_back(ys[i]);
        } else if (i + 1 < ys.size() && ps[i + 1] != 0.0 && (ps[i] > 0.0) != (ps[i + 1] > 0.0)) {
            roots.push_back(bisect(ys[i], ys[i + 1], ps[i]));
        }
    }
    if (roots.empty()) {
        std::ostringstream os;
        os << "no sign change of Phi(y) - y on " << ys.size() << " log-spaced points in [" << lo << ", " << hi << "]";
        out.diagnostic = os.str();
    }
    out.points.resize(roots.size());
    parallel_for(roots.size(), [&](std::size_t i) { out.points[i] = make_equilibrium(roots[i]); }, opts_.threads);
    return out;
}

StabilityReport MeanFieldProblem::classify_stability(double y_star) const {
    StabilityReport r;
    const double h = opts_.stability_step * y_star;
    r.derivative = (phi_map(y_star + h).threshold - phi_map(y_star - h).threshold) / (2.0 * h);
    r.stable = std::abs(r.derivative) < 1.0;
    r.marginal = std::abs(std::abs(r.derivative) - 1.0) < opts_.marginal_band;

    const auto iterate = [&](double start) {
        double y = start;
        for (int n = 0; n < 5; ++n) {
            const double lo = hitting_.y0() * (1.0 + 1e-6) + 1e-6;
            y = phi_map(std::max(y, lo)).threshold;
        }
        return std::abs(y - y_star);
    };
    const double d0 = 0.02 * y_star;
    r.distance_below = iterate(y_star - d0);
    r.distance_above = iterate(y_star + d0);
    r.iteration_converges = r.distance_below < d0 && r.distance_above < d0;
    return r;
}

MfcSolution MeanFieldProblem::mfc_optimum() const {
    MfcSolution out;
    const double y0 = hitting_.y0();
    const double lo = y0 + 1e-3 * y0;
    const double hi = payoff_.interaction == Interaction::HarvestRate ? 20.0 * yhat0_ : scan_cap();
    out.grid_lo = lo;
    out.grid_hi = hi;
    const std::vector<double> ys = log_grid(lo, hi, std::max(opts_.mfc_points, 3));
    std::vector<double> hs(ys.size());
    parallel_for(ys.size(), [&](std::size_t i) { hs[i] = population_value(ys[i]); }, opts_.threads);

    const auto H = [&](double y) {
        const double v = population_value(y);
        return std::isfinite(v) ? -v : std::numeric_limits<double>::max();
    };
    struct Candidate {
        double y, v;
    };
    std::vector<Candidate> maxima;
    const std::size_t n = ys.size();
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_ok = i == 0 || hs[i] >= hs[i - 1];
        const bool right_ok = i + 1 == n || hs[i] >= hs[i + 1];
        if (!left_ok || !right_ok) continue;
        const double a = ys[i == 0 ? 0 : i - 1];
        const double b = ys[i + 1 == n ? n - 1 : i + 1];
        std::uintmax_t iters = 200;
        const auto r = boost::math::tools::brent_find_minima(H, a, b, kBrentBits, iters);
        const double v = -r.second;
        maxima.push_back(v >= hs[i] ? Candidate{r.first, v} : Candidate{ys[i], hs[i]});
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : maxima) best = std::max(best, c.v);
    std::vector<double> tied;
    for (const auto& c : maxima)
        if (c.v >= best - opts_.tie_tol) tied.push_back(c.y);
    std::sort(tied.begin(), tied.end());
    out.threshold = tied.front();
    out.value = population_value(out.threshold);
    out.level = interaction_level(out.threshold);
    out.tie = tied.size() > 1;
    out.tied_thresholds = tied;
    out.degenerate = out.value < 0.0;
    return out;
}

ComparisonReport MeanFieldProblem::compare() const {
    ComparisonReport rep;
    rep.mfg = mfg_equilibrium();
    rep.mfc = mfc_optimum();
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& e : rep.mfg.points) {
        const double m = payoff_.interaction == Interaction::HarvestRate ? rep.mfc.threshold - e.threshold
                                                                          : e.threshold - rep.mfc.threshold;
        rep.margins.push_back(m);
        rep.worst_margin = std::min(rep.worst_margin, m);
    }
    if (rep.margins.empty()) rep.worst_margin = -std::numeric_limits<double>::infinity();
    return rep;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> uq(config.q_lo, config.q_hi);
    std::uniform_real_distribution<double> ub(config.b_lo, config.b_hi);
    std::uniform_real_distribution<double> uk(config.K_lo, config.K_hi);
    std::vector<SweepRow> rows(static_cast<std::size_t>(std::max(config.draws, 0)));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].index = static_cast<int>(i);
        rows[i].q = uq(rng);
        rows[i].b = ub(rng);
        rows[i].K = uk(rng);
    }
    MeanFieldOptions opts;
    opts.threads = 1;  // parallelism is across draws
    parallel_for(
        rows.size(),
        [&](std::size_t i) {
            SweepRow& row = rows[i];
            try {
                const Diffusion model = Diffusion::logistic({row.q, row.b, config.beta}, config.y0);
                const MeanFieldProblem problem(model, PayoffSpec::from_expression(row.K, config.phi, config.interaction),
                                               opts);
                const ComparisonReport rep = problem.compare();
                for (const auto& e : rep.mfg.points) {
                    row.y_g.push_back(e.threshold);
                    row.value_g.push_back(e.value);
                }
                row.y_p = rep.mfc.threshold;
                row.value_p = rep.mfc.value;
                row.margin = rep.worst_margin;
                row.holds = rep.holds();
                if (rep.mfg.points.empty()) row.error = rep.mfg.diagnostic;
            } catch (const std::exception& e) {
                row.error = e.what();
                row.holds = false;
            }
        },
        config.threads);
    return rows;
}

}  // namespace mfharvest

#include "mfharvest/quadrature.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <exception>
#include <limits>

namespace mfharvest {

namespace {

constexpr unsigned kMaxDepth = 18;

bool accept(double value, double error, double l1, Tolerance tol) {
    if (!std::isfinite(value) || !std::isfinite(error)) return false;
    return error <= tol.abs + tol.rel * std::max(std::abs(value), l1);
}

// Sums dyadic pieces produced by `piece(k)` for k = 0, 1, ... until they are
// negligible or their ratio is stable enough to sum the tail geometrically.
template <class PieceFn>
Integral sum_dyadic_pieces(PieceFn piece, Tolerance tol, int max_refinements) {
    Integral out;
    double prev = std::numeric_limits<double>::quiet_NaN();
    std::array<double, 3> ratios{};
    int n_ratios = 0;
    int small_run = 0;
    for (int k = 0; k <= max_refinements; ++k) {
        const Integral p = piece(k);
        out.refinements = k;
        if (!p.converged) {
            out.value += p.value;
            out.converged = false;
            return out;
        }
        out.value += p.value;
        out.error += p.error;
        const double bound = tol.abs + tol.rel * std::abs(out.value);
        small_run = std::abs(p.value) <= bound ? small_run + 1 : 0;
        if (small_run >= 2) return out;

        if (std::isfinite(prev) && prev != 0.0) {
            std::rotate(ratios.begin(), ratios.begin() + 1, ratios.end());
            ratios.back() = p.value / prev;
            n_ratios = std::min(n_ratios + 1, 3);
        }
        prev = p.value;
        if (n_ratios == 3) {
            const double r = ratios.back();
            const double spread = std::max(std::abs(ratios[2] - ratios[1]), std::abs(ratios[1] - ratios[0]));
            if (r > 0.0 && r < 0.95 && spread < 1e-2) {
                const double tail = p.value * r / (1.0 - r);
                const double tail_uncertainty = std::abs(tail) * std::max(spread, 1e-14) / (1.0 - r);
                if (tail_uncertainty <= tol.abs + tol.rel * std::abs(out.value + tail)) {
                    out.value += tail;
                    out.error += tail_uncertainty;
                    return out;
                }
            }
        }
    }
    out.converged = false;
    return out;
}

}  // namespace

namespace {

constexpr int kMaxSplits = 16;

struct Piece {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
};

Piece gauss_kronrod(const Integrand& f, double a, double b, double rel) {
    Piece out;
    try {
        // Boost compares the unscaled local error against a scaled target, so short
        // intervals would always recurse to full depth; integrate on [-1, 1] instead.
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        const auto g = [&](double t) { return f(mid + half * t); };
        out.value = half * boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, -1.0, 1.0, kMaxDepth,
                                                                                      rel, &out.error, &out.l1);
        out.error *= std::abs(half);
        out.l1 *= std::abs(half);
    } catch (const std::exception&) {
        out.value = std::numeric_limits<double>::quiet_NaN();
        out.error = std::numeric_limits<double>::infinity();
    }
    return out;
}

// Boost's local test is relative to each subinterval's own L1 norm, which stalls on
// derivative kinks. Bisect against an absolute budget shared by the whole interval.
Piece bisect(const Integrand& f, double a, double b, double rel, double budget, int level, Piece whole) {
    if (std::isfinite(whole.value) && whole.error <= budget) return whole;
    if (level >= kMaxSplits || !std::isfinite(budget)) return whole;
    const double mid = 0.5 * (a + b);
    const Piece left = bisect(f, a, mid, rel, 0.5 * budget, level + 1, gauss_kronrod(f, a, mid, rel));
    const Piece right = bisect(f, mid, b, rel, 0.5 * budget, level + 1, gauss_kronrod(f, mid, b, rel));
    return {left.value + right.value, left.error + right.error, left.l1 + right.l1};
}

}  // namespace

Integral integrate(const Integrand& f, double a, double b, Tolerance tol) {
    if (a == b) return {};
    const double rel = 0.1 * tol.rel;
    const Piece first = gauss_kronrod(f, a, b, rel);
    const double budget = tol.abs + tol.rel * std::max(std::abs(first.value), first.l1);
    const Piece p = bisect(f, a, b, rel, budget, 0, first);
    Integral out{p.value, p.error, accept(p.value, p.error, p.l1, tol), 0};
    return out;
}

Integral integrate_from_zero(const Integrand& f, double b, Tolerance tol, int max_refinements) {
    if (b == 0.0) return {};
    return sum_dyadic_pieces(
        [&](int k) {
            const double hi = std::ldexp(b, -k);
            return integrate(f, 0.5 * hi, hi, tol);
        },
        tol, max_refinements);
}

Integral integrate_to_infinity(const Integrand& f, double a, Tolerance tol, int max_refinements) {
    const double start = a > 0.0 ? a : 1.0;
    Integral head;
    if (a <= 0.0) head = integrate_range(f, a, start, tol);
    Integral tail = sum_dyadic_pieces(
        [&](int k) {
            const double lo = std::ldexp(start, k);
            return integrate(f, lo, 2.0 * lo, tol);
        },
        tol, max_refinements);
    tail.value += head.value;
    tail.error += head.error;
    tail.converged = tail.converged && head.converged;
    return tail;
}

Integral integrate_range(const Integrand& f, double lo, double hi, Tolerance tol) {
    if (lo == hi) return {};
    const bool inf_hi = std::isinf(hi);
    if (lo == 0.0 && inf_hi) {
        const Integral left = integrate_from_zero(f, 1.0, tol);
        const Integral right = integrate_to_infinity(f, 1.0, tol);
        return {left.value + right.value, left.error + right.error, left.converged && right.converged,
                std::max(left.refinements, right.refinements)};
    }
    if (lo == 0.0) return integrate_from_zero(f, hi, tol);
    if (inf_hi) return integrate_to_infinity(f, lo, tol);
    return integrate(f, lo, hi, tol);
}

}  // namespace mfharvest

#pragma once

#include <functional>

namespace mfharvest {

struct Tolerance {
    double abs = 1e-10;
    double rel = 1e-9;
};

/// Result of a numerical integral. `converged` is false when the error estimate
/// misses the tolerance or the value is not finite; callers decide whether that
/// is fatal (domain error) or diagnostic (assumption probes).
struct Integral {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
    int refinements = 0;  // halvings/doublings used on an improper endpoint
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (7/15) on a finite interval [a, b].
Integral integrate(const Integrand& f, double a, double b, Tolerance tol = {});

/// ∫_0^b f. The lower cutoff is halved (at most `max_refinements` times) and each
/// dyadic piece integrated adaptively; once piece ratios settle, the remaining
/// geometric tail is added in closed form. Non-decaying pieces mean divergence.
Integral integrate_from_zero(const Integrand& f, double b, Tolerance tol = {}, int max_refinements = 40);

/// ∫_a^∞ f by doubling the upper cutoff, mirror image of integrate_from_zero.
Integral integrate_to_infinity(const Integrand& f, double a, Tolerance tol = {}, int max_refinements = 40);

/// Dispatches on the endpoints: lo == 0 and hi == +inf are treated as improper.
Integral integrate_range(const Integrand& f, double lo, double hi, Tolerance tol = {});

}  // namespace mfharvest

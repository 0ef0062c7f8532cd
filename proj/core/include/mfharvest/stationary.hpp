#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "mfharvest/hitting.hpp"

namespace mfharvest {

/// One row of an exported density table.
struct DensityPoint {
    double x;
    double pdf;
    double cdf;
};

/// Stationary laws of the uncontrolled, reflected-at-y0 and threshold-controlled processes.
///
/// The controlled law for R(y) is the occupation measure of one cycle divided by
/// the cycle length, so its normalising constant is 1/ξ(y).
class Stationary {
public:
    explicit Stationary(HittingTimes hitting);

    [[nodiscard]] const HittingTimes& hitting() const noexcept { return hitting_; }

    /// κ = 1/ξ(y). Throws DomainError for y <= y0 + 1e-6.
    [[nodiscard]] double normalization(double y) const;
    /// π_{y0,y}(x); zero above the threshold.
    [[nodiscard]] double controlled_density(double y, double x) const;
    [[nodiscard]] double controlled_cdf(double y, double x) const;
    /// E[X_∞^{R(y)}], in [z1, z2] and increasing in y.
    [[nodiscard]] double expected_stock(double y) const;

    /// z1: mean of the diffusion reflected downwards at y0.
    [[nodiscard]] double reflected_mean() const;
    [[nodiscard]] double reflected_density(double x) const;
    /// z2: mean of the uncontrolled stationary law.
    [[nodiscard]] double uncontrolled_mean() const;
    [[nodiscard]] double uncontrolled_density(double x) const;
    [[nodiscard]] std::pair<double, double> stock_bounds() const { return {reflected_mean(), uncontrolled_mean()}; }

    /// `points` log-spaced abscissae on (1e-3 y0, y].
    [[nodiscard]] std::vector<DensityPoint> density_table(double y, int points = 2000) const;

private:
    void require_threshold(double y) const;

    HittingTimes hitting_;
    double total_mass_ = 0.0;
    double z1_ = 0.0;
    double z2_ = 0.0;
};

/// CSV with header `x,pdf,cdf`.
void write_density_csv(std::ostream& os, const std::vector<DensityPoint>& table);

}  // namespace mfharvest

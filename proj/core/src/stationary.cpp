#include "mfharvest/stationary.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "mfharvest/errors.hpp"

namespace mfharvest {

namespace {
constexpr double kMinGap = 1e-6;
}

Stationary::Stationary(HittingTimes hitting) : hitting_(std::move(hitting)) {
    const Diffusion& m = hitting_.model();
    const double y0 = m.y0();
    const Integral mass = m.speed_measure(0.0, INFINITY);
    if (!mass.converged) throw DomainError("speed measure has infinite mass; no stationary law");
    total_mass_ = mass.value;
    z1_ = m.speed_moment(1, 0.0, y0) / hitting_.mass_below_y0();
    z2_ = m.speed_moment(1, 0.0, INFINITY) / total_mass_;
}

void Stationary::require_threshold(double y) const {
    if (!(y > hitting_.y0() + kMinGap)) {
        std::ostringstream os;
        os << "threshold " << y << " must exceed y0 + 1e-6";
        throw DomainError(os.str());
    }
}

double Stationary::normalization(double y) const {
    require_threshold(y);
    return 1.0 / hitting_.xi(y);
}

double Stationary::controlled_density(double y, double x) const {
    const double kappa = normalization(y);
    if (!(x > 0.0)) throw DomainError("density requires x > 0");
    if (x > y) return 0.0;
    const Diffusion& m = hitting_.model();
    const double from = std::max(x, m.y0());
    return kappa * m.speed_density(x) * m.scale_between(from, y);
}

double Stationary::controlled_cdf(double y, double x) const {
    const double kappa = normalization(y);
    if (x <= 0.0) return 0.0;
    if (x >= y) return 1.0;
    const Diffusion& m = hitting_.model();
    const double y0 = m.y0();
    if (x <= y0) return kappa * m.scale_between(y0, y) * m.speed_measure(0.0, x).value;
    // 1 - F(x) = κ ∫_x^y S[w,y] m(w) dw = κ ∫_x^y s(v) M[x,v] dv
    const auto f = [&](double v) { return m.scale_density(v) * m.speed_measure(x, v).value; };
    return 1.0 - kappa * integrate(f, x, y, m.tolerance()).value;
}

double Stationary::expected_stock(double y) const {
    const double kappa = normalization(y);
    return kappa * hitting_.expected_running_cost(LinearCost{0.0, 1.0}, hitting_.y0(), y);
}

double Stationary::reflected_mean() const { return z1_; }

double Stationary::reflected_density(double x) const {
    if (!(x > 0.0)) throw DomainError("density requires x > 0");
    if (x > hitting_.y0()) return 0.0;
    return hitting_.model().speed_density(x) / hitting_.mass_below_y0();
}

double Stationary::uncontrolled_mean() const { return z2_; }

double Stationary::uncontrolled_density(double x) const {
    if (!(x > 0.0)) throw DomainError("density requires x > 0");
    return hitting_.model().speed_density(x) / total_mass_;
}

std::vector<DensityPoint> Stationary::density_table(double y, int points) const {
    require_threshold(y);
    if (points < 2) throw DomainError("density table needs at least 2 points");
    const double lo = 1e-3 * hitting_.y0();
    std::vector<DensityPoint> out;
    out.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double x = lo * std::pow(y / lo, static_cast<double>(i) / (points - 1));
        out.push_back({x, controlled_density(y, x), controlled_cdf(y, x)});
    }
    return out;
}

void write_density_csv(std::ostream& os, const std::vector<DensityPoint>& table) {
    os << "x,pdf,cdf\n" << std::setprecision(10);
    for (const auto& p : table) os << p.x << ',' << p.pdf << ',' << p.cdf << '\n';
}

}  // namespace mfharvest

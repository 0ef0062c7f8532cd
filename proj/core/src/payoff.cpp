#include "mfharvest/payoff.hpp"

#include <cmath>
#include <sstream>

#include "mfharvest/errors.hpp"
#include "mfharvest/expression.hpp"

namespace mfharvest {

std::string_view to_string(Interaction kind) noexcept {
    return kind == Interaction::HarvestRate ? "harvest_rate" : "expected_stock";
}

Interaction parse_interaction(std::string_view text) {
    if (text == "harvest_rate") return Interaction::HarvestRate;
    if (text == "expected_stock") return Interaction::ExpectedStock;
    throw ParseError("unknown interaction '" + std::string(text) + "' (expected harvest_rate or expected_stock)");
}

PayoffSpec PayoffSpec::from_expression(double K, std::string_view phi, Interaction kind) {
    if (!(K >= 0.0) || !std::isfinite(K)) throw DomainError("K must be a finite nonnegative number");
    const Expression e = Expression::compile(phi, "z");
    return {K, [e](double z) { return e(z); }, kind, std::string(phi)};
}

PayoffSpec PayoffSpec::constant(double K, double price, Interaction kind) {
    if (!(K >= 0.0) || !std::isfinite(K)) throw DomainError("K must be a finite nonnegative number");
    std::ostringstream os;
    os.precision(17);
    os << price;
    return {K, [price](double) { return price; }, kind, os.str()};
}

}  // namespace mfharvest

#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace mfharvest {

enum class Interaction { HarvestRate, ExpectedStock };

std::string_view to_string(Interaction kind) noexcept;
/// Accepts "harvest_rate" / "expected_stock". Throws ParseError otherwise.
Interaction parse_interaction(std::string_view text);

/// γ(y, z) = (y - y0) φ(z), each impulse costs K.
struct PayoffSpec {
    double K = 1.0;
    std::function<double(double)> phi;
    Interaction interaction = Interaction::HarvestRate;
    std::string phi_text;  // for reports

    /// φ from the expression grammar in the variable `z`.
    static PayoffSpec from_expression(double K, std::string_view phi, Interaction kind);
    /// φ ≡ price.
    static PayoffSpec constant(double K, double price, Interaction kind);
};

}  // namespace mfharvest

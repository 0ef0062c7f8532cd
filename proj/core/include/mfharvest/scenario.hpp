#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mfharvest/diffusion.hpp"
#include "mfharvest/meanfield.hpp"
#include "mfharvest/payoff.hpp"
#include "mfharvest/simulation.hpp"

namespace mfharvest {

/// A scenario file:
///
///     {
///       "name": "...",                                   optional
///       "model": {"kind": "logistic", "q": -1, "b": 0.5, "beta": 1, "y0": 1, "reference": 1}
///             or {"kind": "custom", "drift": "<expr in x>", "vol": "<expr in x>", "y0": 1},
///       "payoff": {"K": 1, "phi": "<expr in z>", "interaction": "harvest_rate" | "expected_stock"},
///       "numerics": {"tol": 1e-9, "grid": 500, "dt": 1e-3, "seed": 42,
///                    "paths": 100000, "horizon": 100000, "threads": 0},   all optional
///       "single":   {"z": 0},                            optional
///       "simulate": {"threshold": 5.13, "path_horizon": 50, "stride": 10},   optional
///       "sweep":    {"draws": 100, "seed": 1, "q": [-2, -0.2], "b": [0.2, 1], "K": [0.5, 2]}   optional
///     }
///
/// Unknown keys are rejected so typos do not silently fall back to defaults.
struct Scenario {
    std::string name;
    Diffusion model = Diffusion::logistic({}, 1.0);
    PayoffSpec payoff;
    Tolerance tolerance;
    MeanFieldOptions meanfield;
    SimConfig sim;
    std::int64_t paths = 100000;
    double single_z = 0.0;
    std::optional<double> simulate_threshold;
    double path_horizon = 50.0;
    int path_stride = 10;
    SweepConfig sweep;
};

/// Throws ParseError naming the offending key or byte offset.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);
/// The "model" object on its own.
Diffusion parse_model(std::string_view text);

}  // namespace mfharvest

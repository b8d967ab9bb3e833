#ifndef FRACORDER_SCENARIO_HPP
#define FRACORDER_SCENARIO_HPP

#include <optional>
#include <string>
#include <vector>

#include "fracorder/forward.hpp"
#include "fracorder/inverse.hpp"
#include "fracorder/symbol.hpp"

namespace fracorder {

inline constexpr const char* kScenarioSchema = "fracorder-scenario/1";

/// A validated scenario file (schema fracorder-scenario/1). Unknown keys are rejected.
struct Scenario {
    FrequencyBox box;
    MatrixSymbol symbol;
    std::optional<BandLimitedData> data;
    DerivativeKind kind = DerivativeKind::Caputo;
    std::optional<RVector> order;
    double beta0 = 0.1;
    /// nullopt means "auto": use suggest_observation_time.
    std::optional<double> t0;
    std::optional<RVector> xi0;
    std::vector<double> times;
    std::vector<RVector> x_points;
    InverseTolerances tolerances;

    const BandLimitedData& spectrum() const;
    VectorOrder vector_order() const;
    const RVector& observation_point() const;
};

/// Relative file paths inside the scenario resolve against base_dir.
Scenario parse_scenario(const std::string& text, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

/// The ready-made scenario for the two-mode example symbol.
std::string example_scenario_json();

}  // namespace fracorder

#endif  // FRACORDER_SCENARIO_HPP

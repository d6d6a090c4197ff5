#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "citeflow/flows.hpp"

namespace citeflow {

// Sums flow entries and volumes by the parent mapping up to `target`. The
// kind (and normalization level, if any) is preserved. Identity when target
// equals the source level; throws LevelOrderError when target is finer.
FlowMatrix roll_up(const FlowMatrix& fm, const Nomenclature& nomenclature, Level target);

// Checks which indicators survive aggregation: impact, growth and propensity
// roll up exactly through the flow algebra (the parent value is the
// volume-weighted combination of its children), while balance does not in
// general. A witness parent is reported when one exists.
struct StabilityReport {
    struct LevelStep {
        Level from = Level::specialty;
        Level to = Level::sub_discipline;
        double max_commute_residual = 0.0;   // rolled-up vs. built-directly, entry-wise
        double max_impact_residual = 0.0;    // parent I vs. volume-weighted children
        double max_growth_residual = 0.0;
        double max_kappa_residual = 0.0;
    };

    struct BalanceWitness {
        Level level = Level::sub_discipline;  // level of the parent domain
        std::string parent_id;
        double parent_balance = 0.0;
        double children_weighted_mean = 0.0;  // citable-volume weights
        double children_arithmetic_mean = 0.0;
    };

    std::vector<LevelStep> steps;
    std::optional<BalanceWitness> witness;  // largest |parent - weighted mean| found

    std::string to_string() const;
    nlohmann::json to_json() const;
};

StabilityReport check_aggregation_stability(const Corpus& corpus, const PeriodSpec& period);

}  // namespace citeflow

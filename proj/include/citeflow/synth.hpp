#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "citeflow/metrics.hpp"

namespace citeflow {

// Planted parameters for one synthetic domain. The domain id names a
// specialty; the optional parent ids place it in the hierarchy (defaults
// group everything under one sub-discipline and discipline).
struct ScenarioDomain {
    std::string id;
    std::string sub_discipline = "sd0";
    std::string discipline = "d0";
    std::uint32_t volume_t0 = 1;   // articles in the first cohort year
    double growth = 1.0;           // planted rho*
    double propensity = 1.0;       // planted kappa*: references per citing article
    std::string life_stage = "mature";  // emerging | mature | declining (descriptive tag)
};

// Synthetic corpus recipe: cohort sizes compound by the planted growth year
// over year, every citing article emits round(kappa*) references to articles
// of the previous year, with the cited domain drawn from the exchange row.
struct ScenarioSpec {
    std::uint64_t seed = 0;
    int start_year = 2000;
    int years = 1;  // cohorts cover [start_year, start_year + years]
    std::vector<ScenarioDomain> domains;
    // Row-stochastic: exchange[citing][cited] is the share of the citing
    // domain's references aimed at the cited domain.
    std::vector<std::vector<double>> exchange;

    void validate() const;  // throws InfeasibleSpecError / ParseError

    static ScenarioSpec from_json(const nlohmann::json& doc);
    static ScenarioSpec from_json_file(const std::string& path);
    nlohmann::json to_json() const;

    // The two-cohort window at the start of the scenario.
    PeriodSpec base_period() const;
};

// Deterministic given the seed: per-domain, per-year subgenerators make the
// output independent of thread count. References are sampled without
// replacement per citing article so the corpus carries no duplicate edges.
Corpus generate(const ScenarioSpec& spec);

// Brute-force recomputation of every indicator by direct edge enumeration.
// Shares no computation with the flows/normalize/metrics path; used as the
// equivalence oracle. Throws SizeLimitError above `kOracleEdgeLimit` edges.
inline constexpr std::size_t kOracleEdgeLimit = 100000;

MetricsSet oracle_metrics(const Corpus& corpus, Level level, const PeriodSpec& period);

}  // namespace citeflow

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "citeflow/metrics.hpp"

namespace citeflow {

enum class WeightScheme { citable_volume, citing_volume, uniform };

const char* weight_scheme_name(WeightScheme scheme);
std::optional<WeightScheme> parse_weight_scheme(std::string_view name);

// Science-level dispersion of the log factors over domains. Weighted moments
// use the population formula (no bias correction) so the decomposition
// wVar(LI) = wVar(LG) + wVar(LB) + 2 wCov(LG,LB) is exact algebra.
struct ScienceSummary {
    Level level = Level::specialty;
    PeriodSpec period;
    WeightScheme weight_scheme = WeightScheme::citable_volume;

    double w_var_log_impact = 0.0;
    double w_var_log_growth = 0.0;
    double w_var_log_balance = 0.0;
    double w_cov_growth_balance = 0.0;
    double change_exchange_index = 0.0;  // CEI = wVar(LG) + wVar(LB)

    // Unweighted counterparts over the same usable domains.
    double u_var_log_impact = 0.0;
    double u_var_log_growth = 0.0;
    double u_var_log_balance = 0.0;
    double u_cov_growth_balance = 0.0;

    // Unweighted Pearson correlation of (LG, LB); exported as a convenience.
    double corr_growth_balance = 0.0;

    std::uint64_t n_domains = 0;       // usable domains
    std::uint64_t excluded_count = 0;  // domains without finite log factors
};

// Throws InsufficientDomainsError when fewer than two domains have finite
// log factors.
ScienceSummary summarize(const MetricsSet& metrics, WeightScheme scheme);

double cei(const ScienceSummary& summary);

struct SeriesSpec {
    int cited_from = 0;
    int cited_to = 0;
    int window_years = 1;  // citing window is [year+1, year+window_years]
    WeightScheme weighting = WeightScheme::citable_volume;
    std::optional<Level> normalization_level;  // defaults to the reporting level
    std::optional<int> data_end_year;          // defaults to the corpus max year
    FlowBuildOptions flow_options;
};

struct SeriesPoint {
    int cited_year = 0;
    bool reduced_window = false;  // citing window clipped at the data end
    std::optional<ScienceSummary> summary;
    std::string error;  // set when this point failed; the series continues
};

// One summary per cited year. Points are independent and computed in
// parallel; failures are recorded per point.
std::vector<SeriesPoint> time_series(const Corpus& corpus, Level level, const SeriesSpec& spec);

// `alt_headers` switches the five main columns to the legacy chart legend
// names (varlnimnor, varlngrowr, varlnbalnor, covgrbal, CEI).
void write_series_tsv(const std::vector<SeriesPoint>& points, const std::string& path,
                      bool alt_headers = false);

}  // namespace citeflow

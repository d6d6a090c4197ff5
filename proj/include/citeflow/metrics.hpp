#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "citeflow/normalize.hpp"

namespace citeflow {

// Per-domain indicator bundle. Rates are annualized: impact counts citations
// per citable article per citing-year, growth compares annualized volumes.
// The relative ("hat") versions divide by the science-level counterpart.
struct DomainMetrics {
    std::string domain_id;

    double impact = 0.0;          // I: citations received per citable article
    double growth = 0.0;          // rho: citing-period volume / cited-period volume
    double growth_rel = 0.0;      // rho_hat
    double balance = 0.0;         // B: received / emitted
    double kappa = 0.0;           // references per citing article
    double kappa_rel = 0.0;       // kappa_hat
    double impact_rel = 0.0;      // I_hat
    double balance_norm = 0.0;    // B_g: balance on the normalized matrix
    double impact_rel_norm = 0.0; // I_hat_g: relative impact on the normalized matrix
    double kappa_rel_norm = 0.0;  // kappa_hat on the normalized matrix (1 when levels match)

    // Log factors. log_impact is stored as the exact sum of the other two so
    // the variance decomposition is pure algebra downstream.
    double log_growth = 0.0;   // LG = ln(growth_rel)
    double log_balance = 0.0;  // LB = ln(balance_norm)
    double log_impact = 0.0;   // LI = LG + LB

    double citable_weight = 0.0;  // annualized cited-period volume
    double citing_weight = 0.0;   // annualized citing-period volume

    bool defined = false;      // citable volume > 0: impact well-defined
    bool log_defined = false;  // all log factors finite
    bool zero_outflow = false; // emitted nothing: balance infinite
    bool zero_inflow = false;  // received nothing: balance zero
};

struct ScienceMetrics {
    double impact = 0.0;
    double growth = 0.0;
    double kappa = 0.0;
    double impact_norm = 0.0;  // impact on the normalized matrix (equals impact up to rounding)
};

struct MetricsSet {
    Level level = Level::specialty;
    Level normalization_level = Level::specialty;
    bool level_mismatch = false;  // identities of the normalized factors not guaranteed
    PeriodSpec period;
    std::vector<DomainMetrics> domains;
    ScienceMetrics science;
    std::uint64_t excluded_zero_volume = 0;
    std::uint64_t excluded_zero_outflow = 0;
    std::uint64_t excluded_zero_inflow = 0;
    // Base of the stored logs; ratios of variances are base-free but absolute
    // variances are not, so the base travels with the data.
    std::string log_base = "e";
};

// Both matrices must share level and period; `normalized` must be
// kind == normalized. Domains with zero citable volume are reported undefined;
// zero in-/out-flow domains are excluded from log statistics and counted.
MetricsSet compute_domain_metrics(const FlowMatrix& gross, const FlowMatrix& normalized);

struct PropositionReport {
    struct Residuals {
        std::string domain_id;
        double gross_identity = 0.0;       // |I - rho*B*kappa| relative
        double relative_identity = 0.0;    // |I_hat - rho_hat*B*kappa_hat| relative
        double normalized_identity = 0.0;  // |I_hat_g - rho_hat*B_g| relative
    };
    std::vector<Residuals> rows;
    double max_gross = 0.0;
    double max_relative = 0.0;
    double max_normalized = 0.0;
    std::uint64_t checked = 0;
    std::uint64_t skipped = 0;  // undefined domains
    bool level_mismatch = false;
    double tolerance = 1e-9;
    bool pass = false;

    std::string to_string() const;
};

// Per-domain residuals of the three decomposition identities. When the
// normalization level differs from the reporting level the identities are not
// expected to hold; the report carries the warning and is still produced.
PropositionReport verify_propositions(const MetricsSet& metrics, double tolerance = 1e-9);

void write_metrics_tsv(const MetricsSet& metrics, const std::string& path);

struct PipelineArtifacts {
    FlowMatrix gross;
    FlowMatrix normalized;
    CitingPropensity propensity;  // at the normalization level
    MetricsSet metrics;
};

// flows -> normalize -> metrics for one period. Handles mixed normalization
// levels by re-weighting at the specialty level and rolling up.
PipelineArtifacts run_pipeline(const Corpus& corpus, Level level, const PeriodSpec& period,
                               Level normalization_level, const FlowBuildOptions& options = {});

MetricsSet compute_metrics_pipeline(const Corpus& corpus, Level level, const PeriodSpec& period,
                                    Level normalization_level,
                                    const FlowBuildOptions& options = {});

}  // namespace citeflow

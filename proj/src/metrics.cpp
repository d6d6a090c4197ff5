#include "citeflow/metrics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "citeflow/aggregate.hpp"
#include "citeflow/detail/text.hpp"

namespace citeflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double relative_residual(double lhs, double rhs) {
    double denom = std::max(std::abs(lhs), std::abs(rhs));
    if (denom == 0.0) return 0.0;
    return std::abs(lhs - rhs) / denom;
}

}  // namespace

MetricsSet compute_domain_metrics(const FlowMatrix& gross, const FlowMatrix& normalized) {
    if (gross.level() != normalized.level())
        throw Error("gross and normalized matrices must share the reporting level");
    if (!(gross.period() == normalized.period()))
        throw Error("gross and normalized matrices must share the period");
    if (normalized.kind() != MatrixKind::normalized)
        throw Error("second matrix must be citing-side normalized");

    MetricsSet set;
    set.level = gross.level();
    set.period = gross.period();
    set.normalization_level = normalized.normalization_level().value_or(gross.level());
    set.level_mismatch = set.normalization_level != set.level;

    const double citing_years = gross.period().citing_years();
    const int n = gross.domain_count();

    // Science-level aggregates.
    const double total = gross.total_flow();
    const double total_norm = normalized.total_flow();
    const double citable_s = gross.citable_volume_total();   // annualized
    const double citing_s = gross.citing_volume_total();
    const double citing_raw_s = citing_s * citing_years;
    set.science.impact = citable_s > 0.0 ? (total / citing_years) / citable_s : kNaN;
    set.science.growth = citable_s > 0.0 ? citing_s / citable_s : kNaN;
    set.science.kappa = citing_raw_s > 0.0 ? total / citing_raw_s : kNaN;
    set.science.impact_norm = citable_s > 0.0 ? (total_norm / citing_years) / citable_s : kNaN;
    const double kappa_norm_s = citing_raw_s > 0.0 ? total_norm / citing_raw_s : kNaN;

    set.domains.reserve(n);
    for (int d = 0; d < n; ++d) {
        DomainMetrics m;
        m.domain_id = gross.domain_ids()[d];
        m.citable_weight = gross.citable_volume(d);
        m.citing_weight = gross.citing_volume(d);

        const double in = gross.in_flow(d);
        const double out = gross.out_flow(d);
        const double in_norm = normalized.in_flow(d);
        const double out_norm = normalized.out_flow(d);
        const double citing_raw = m.citing_weight * citing_years;

        m.zero_outflow = out == 0.0;
        m.zero_inflow = in == 0.0;
        m.defined = m.citable_weight > 0.0;
        if (!m.defined) {
            // Impact undefined: report the domain with null metrics.
            ++set.excluded_zero_volume;
            m.impact = m.growth = m.growth_rel = m.balance = m.kappa = m.kappa_rel = kNaN;
            m.impact_rel = m.balance_norm = m.impact_rel_norm = m.kappa_rel_norm = kNaN;
            m.log_growth = m.log_balance = m.log_impact = kNaN;
            set.domains.push_back(std::move(m));
            continue;
        }

        m.impact = (in / citing_years) / m.citable_weight;
        m.growth = m.citing_weight / m.citable_weight;
        m.balance = out > 0.0 ? in / out : kNaN;
        m.kappa = citing_raw > 0.0 ? out / citing_raw : 0.0;
        m.growth_rel = m.growth / set.science.growth;
        m.kappa_rel = m.kappa / set.science.kappa;
        m.impact_rel = m.impact / set.science.impact;
        m.balance_norm = out_norm > 0.0 ? in_norm / out_norm : kNaN;
        m.impact_rel_norm = ((in_norm / citing_years) / m.citable_weight) / set.science.impact_norm;
        m.kappa_rel_norm =
            citing_raw > 0.0 ? (out_norm / citing_raw) / kappa_norm_s : kNaN;

        if (m.zero_outflow) ++set.excluded_zero_outflow;
        if (m.zero_inflow) ++set.excluded_zero_inflow;

        m.log_growth = std::log(m.growth_rel);
        m.log_balance = std::isnan(m.balance_norm) ? kNaN : std::log(m.balance_norm);
        m.log_impact = m.log_growth + m.log_balance;  // exact sum of the stored factors
        m.log_defined = std::isfinite(m.log_growth) && std::isfinite(m.log_balance);
        set.domains.push_back(std::move(m));
    }
    return set;
}

PropositionReport verify_propositions(const MetricsSet& metrics, double tolerance) {
    PropositionReport report;
    report.tolerance = tolerance;
    report.level_mismatch = metrics.level_mismatch;
    for (const DomainMetrics& m : metrics.domains) {
        if (!m.defined || m.zero_outflow || !std::isfinite(m.balance)) {
            ++report.skipped;
            continue;
        }
        PropositionReport::Residuals r;
        r.domain_id = m.domain_id;
        r.gross_identity = relative_residual(m.impact, m.growth * m.balance * m.kappa);
        r.relative_identity =
            relative_residual(m.impact_rel, m.growth_rel * m.balance * m.kappa_rel);
        r.normalized_identity =
            relative_residual(m.impact_rel_norm, m.growth_rel * m.balance_norm);
        report.max_gross = std::max(report.max_gross, r.gross_identity);
        report.max_relative = std::max(report.max_relative, r.relative_identity);
        report.max_normalized = std::max(report.max_normalized, r.normalized_identity);
        report.rows.push_back(std::move(r));
        ++report.checked;
    }
    report.pass = report.max_gross < tolerance && report.max_relative < tolerance &&
                  report.max_normalized < tolerance;
    return report;
}

std::string PropositionReport::to_string() const {
    std::ostringstream out;
    if (level_mismatch)
        out << "warning: normalization level differs from reporting level; the normalized "
               "decomposition is not expected to hold\n";
    out << "identity residuals over " << checked << " domains (" << skipped << " skipped): "
        << "gross=" << detail::format_double(max_gross)
        << " relative=" << detail::format_double(max_relative)
        << " normalized=" << detail::format_double(max_normalized) << " tolerance="
        << detail::format_double(tolerance) << " -> " << (pass ? "PASS" : "FAIL");
    return std::move(out).str();
}

void write_metrics_tsv(const MetricsSet& metrics, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << "domain\tI\trho\trho_hat\tB\tkappa\tkappa_hat\tI_hat\tB_g\tI_hat_g\tLI\tLG\tLB\t"
           "citable_volume\tciting_volume\tflags\n";
    auto row = [&](const std::string& id, double impact, double growth, double growth_rel,
                   double balance, double kappa, double kappa_rel, double impact_rel,
                   double balance_norm, double impact_rel_norm, double li, double lg, double lb,
                   double citable, double citing, const std::string& flags) {
        out << id;
        for (double v : {impact, growth, growth_rel, balance, kappa, kappa_rel, impact_rel,
                         balance_norm, impact_rel_norm, li, lg, lb, citable, citing})
            out << '\t' << detail::format_double(v);
        out << '\t' << flags << '\n';
    };
    for (const DomainMetrics& m : metrics.domains) {
        std::string flags;
        if (!m.defined) flags += "zero_citable_volume;";
        if (m.zero_outflow) flags += "zero_outflow;";
        if (m.zero_inflow) flags += "zero_inflow;";
        if (flags.empty()) flags = "-";
        row(m.domain_id, m.impact, m.growth, m.growth_rel, m.balance, m.kappa, m.kappa_rel,
            m.impact_rel, m.balance_norm, m.impact_rel_norm, m.log_impact, m.log_growth,
            m.log_balance, m.citable_weight, m.citing_weight, flags);
    }
    double citable_s = 0.0, citing_s = 0.0;
    for (const DomainMetrics& m : metrics.domains) {
        citable_s += m.citable_weight;
        citing_s += m.citing_weight;
    }
    // Science is a closed system: its balance is 1 and all relatives are 1.
    const ScienceMetrics& s = metrics.science;
    row("__S__", s.impact, s.growth, 1.0, 1.0, s.kappa, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0,
        citable_s, citing_s, "science");
}

PipelineArtifacts run_pipeline(const Corpus& corpus, Level level, const PeriodSpec& period,
                               Level normalization_level, const FlowBuildOptions& options) {
    PipelineArtifacts artifacts;
    artifacts.gross = build_flow_matrix(corpus, level, period, options);
    if (normalization_level == level) {
        artifacts.propensity = compute_propensity(artifacts.gross);
        artifacts.normalized = normalize_edges(artifacts.gross, artifacts.propensity);
    } else {
        // Mixed levels: re-weight at the specialty level (every row has a
        // unique ancestor at the propensity level) and roll up to the
        // reporting level.
        FlowMatrix gross_at_norm = build_flow_matrix(corpus, normalization_level, period, options);
        artifacts.propensity = compute_propensity(gross_at_norm);
        FlowMatrix gross_specialty =
            level == Level::specialty
                ? artifacts.gross
                : build_flow_matrix(corpus, Level::specialty, period, options);
        FlowMatrix normalized_specialty =
            normalize_edges(gross_specialty, artifacts.propensity, corpus.nomenclature());
        artifacts.normalized = roll_up(normalized_specialty, corpus.nomenclature(), level);
    }
    artifacts.metrics = compute_domain_metrics(artifacts.gross, artifacts.normalized);
    return artifacts;
}

MetricsSet compute_metrics_pipeline(const Corpus& corpus, Level level, const PeriodSpec& period,
                                    Level normalization_level, const FlowBuildOptions& options) {
    return run_pipeline(corpus, level, period, normalization_level, options).metrics;
}

}  // namespace citeflow

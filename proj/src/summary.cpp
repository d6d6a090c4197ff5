#include "citeflow/summary.hpp"

#include <cmath>
#include <fstream>
#include <future>

#include "citeflow/detail/text.hpp"

namespace citeflow {

const char* weight_scheme_name(WeightScheme scheme) {
    switch (scheme) {
        case WeightScheme::citable_volume: return "citable_volume";
        case WeightScheme::citing_volume: return "citing_volume";
        case WeightScheme::uniform: return "uniform";
    }
    return "?";
}

std::optional<WeightScheme> parse_weight_scheme(std::string_view name) {
    if (name == "volume" || name == "citable_volume") return WeightScheme::citable_volume;
    if (name == "citing" || name == "citing_volume") return WeightScheme::citing_volume;
    if (name == "uniform") return WeightScheme::uniform;
    return std::nullopt;
}

namespace {

struct Moments {
    double var_x = 0.0;   // LG
    double var_y = 0.0;   // LB
    double var_sum = 0.0; // LI = LG + LB
    double cov = 0.0;
};

// Population (non-debiased) weighted moments; the decomposition identity
// Var(x+y) = Var(x) + Var(y) + 2 Cov(x,y) needs the same weights everywhere
// and no bias correction.
Moments weighted_moments(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<double>& s, const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double mean_x = 0.0, mean_y = 0.0, mean_s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean_x += weights[i] * x[i];
        mean_y += weights[i] * y[i];
        mean_s += weights[i] * s[i];
    }
    mean_x /= total;
    mean_y /= total;
    mean_s /= total;
    Moments m;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double p = weights[i] / total;
        double dx = x[i] - mean_x;
        double dy = y[i] - mean_y;
        double ds = s[i] - mean_s;
        m.var_x += p * dx * dx;
        m.var_y += p * dy * dy;
        m.var_sum += p * ds * ds;
        m.cov += p * dx * dy;
    }
    return m;
}

}  // namespace

ScienceSummary summarize(const MetricsSet& metrics, WeightScheme scheme) {
    std::vector<double> lg, lb, li, weights;
    std::uint64_t excluded = 0;
    for (const DomainMetrics& m : metrics.domains) {
        double weight = 1.0;
        if (scheme == WeightScheme::citable_volume) weight = m.citable_weight;
        if (scheme == WeightScheme::citing_volume) weight = m.citing_weight;
        if (!m.log_defined || !(weight > 0.0)) {
            ++excluded;
            continue;
        }
        lg.push_back(m.log_growth);
        lb.push_back(m.log_balance);
        li.push_back(m.log_impact);
        weights.push_back(weight);
    }
    if (lg.size() < 2)
        throw InsufficientDomainsError("need at least 2 domains with finite log factors, have " +
                                       std::to_string(lg.size()));

    ScienceSummary summary;
    summary.level = metrics.level;
    summary.period = metrics.period;
    summary.weight_scheme = scheme;
    summary.n_domains = lg.size();
    summary.excluded_count = excluded;

    Moments weighted = weighted_moments(lg, lb, li, weights);
    summary.w_var_log_growth = weighted.var_x;
    summary.w_var_log_balance = weighted.var_y;
    summary.w_var_log_impact = weighted.var_sum;
    summary.w_cov_growth_balance = weighted.cov;
    summary.change_exchange_index = weighted.var_x + weighted.var_y;

    std::vector<double> ones(lg.size(), 1.0);
    Moments unweighted = weighted_moments(lg, lb, li, ones);
    summary.u_var_log_growth = unweighted.var_x;
    summary.u_var_log_balance = unweighted.var_y;
    summary.u_var_log_impact = unweighted.var_sum;
    summary.u_cov_growth_balance = unweighted.cov;

    double denom = std::sqrt(unweighted.var_x * unweighted.var_y);
    summary.corr_growth_balance = denom > 0.0 ? unweighted.cov / denom : 0.0;
    return summary;
}

double cei(const ScienceSummary& summary) {
    return summary.change_exchange_index;
}

std::vector<SeriesPoint> time_series(const Corpus& corpus, Level level, const SeriesSpec& spec) {
    if (spec.cited_from > spec.cited_to) throw ParseError("series: cited_from > cited_to");
    if (spec.window_years < 1) throw ParseError("series: window must be at least 1 year");
    const int data_end = spec.data_end_year.value_or(corpus.max_year());
    const Level norm_level = spec.normalization_level.value_or(level);

    std::vector<SeriesPoint> points(spec.cited_to - spec.cited_from + 1);
    auto compute_point = [&](int index) {
        SeriesPoint& point = points[index];
        int year = spec.cited_from + index;
        point.cited_year = year;
        int citing_end = std::min(year + spec.window_years, data_end);
        point.reduced_window = citing_end < year + spec.window_years;
        try {
            if (citing_end < year + 1)
                throw EmptyWindowError("no citing years available after " + std::to_string(year));
            PeriodSpec period{year, year, year + 1, citing_end};
            MetricsSet metrics =
                compute_metrics_pipeline(corpus, level, period, norm_level, spec.flow_options);
            point.summary = summarize(metrics, spec.weighting);
        } catch (const Error& e) {
            point.error = e.what();
        }
    };

    // Points are independent; a handful of futures per series is plenty.
    std::vector<std::future<void>> futures;
    futures.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        futures.push_back(std::async(std::launch::async | std::launch::deferred, compute_point,
                                     static_cast<int>(i)));
    for (auto& f : futures) f.get();
    return points;
}

void write_series_tsv(const std::vector<SeriesPoint>& points, const std::string& path,
                      bool alt_headers) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    if (alt_headers)
        out << "year\tvarlnimnor\tvarlngrowr\tvarlnbalnor\tcovgrbal\tCEI";
    else
        out << "year\twVar_LI\twVar_LG\twVar_LB\twCov_LG_LB\tCEI";
    out << "\tuVar_LI\tuVar_LG\tuVar_LB\tuCov_LG_LB\tcorr_LG_LB\tn_domains\texcluded\t"
           "reduced_window\terror\n";
    for (const SeriesPoint& p : points) {
        out << p.cited_year;
        if (p.summary) {
            const ScienceSummary& s = *p.summary;
            for (double v : {s.w_var_log_impact, s.w_var_log_growth, s.w_var_log_balance,
                             s.w_cov_growth_balance, s.change_exchange_index, s.u_var_log_impact,
                             s.u_var_log_growth, s.u_var_log_balance, s.u_cov_growth_balance,
                             s.corr_growth_balance})
                out << '\t' << detail::format_double(v);
            out << '\t' << s.n_domains << '\t' << s.excluded_count;
        } else {
            for (int i = 0; i < 10; ++i) out << "\tnan";
            out << "\t0\t0";
        }
        out << '\t' << (p.reduced_window ? 1 : 0) << '\t' << (p.error.empty() ? "-" : p.error)
            << '\n';
    }
}

}  // namespace citeflow

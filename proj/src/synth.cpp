#include "citeflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "citeflow/detail/parallel.hpp"
#include "citeflow/detail/rng.hpp"
#include "citeflow/detail/text.hpp"

namespace citeflow {

void ScenarioSpec::validate() const {
    if (domains.empty()) throw InfeasibleSpecError("scenario has no domains");
    if (years < 1) throw InfeasibleSpecError("scenario must span at least one year step");
    if (exchange.size() != domains.size())
        throw InfeasibleSpecError("exchange matrix must have one row per domain");
    for (std::size_t i = 0; i < domains.size(); ++i) {
        const ScenarioDomain& d = domains[i];
        if (d.id.empty()) throw InfeasibleSpecError("domain with empty id");
        if (d.volume_t0 < 1) throw InfeasibleSpecError("domain '" + d.id + "': volume_t0 < 1");
        if (!(d.growth > 0.0)) throw InfeasibleSpecError("domain '" + d.id + "': growth <= 0");
        if (!(d.propensity > 0.0))
            throw InfeasibleSpecError("domain '" + d.id + "': propensity <= 0");
        if (exchange[i].size() != domains.size())
            throw InfeasibleSpecError("exchange row " + std::to_string(i) + " has wrong width");
        double sum = 0.0;
        for (double share : exchange[i]) {
            if (share < 0.0) throw InfeasibleSpecError("negative exchange share");
            sum += share;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw InfeasibleSpecError("exchange row for '" + d.id + "' sums to " +
                                      detail::format_double(sum));
    }
}

ScenarioSpec ScenarioSpec::from_json(const nlohmann::json& doc) {
    ScenarioSpec spec;
    spec.seed = doc.value("seed", std::uint64_t{0});
    spec.start_year = doc.value("start_year", 2000);
    spec.years = doc.value("years", 1);
    if (!doc.contains("domains") || !doc["domains"].is_array())
        throw ParseError("scenario: missing 'domains' array");
    for (const auto& d : doc["domains"]) {
        ScenarioDomain domain;
        domain.id = d.at("id").get<std::string>();
        domain.sub_discipline = d.value("sub_discipline", "sd0");
        domain.discipline = d.value("discipline", "d0");
        domain.volume_t0 = d.value("volume_t0", 1u);
        domain.growth = d.value("growth", 1.0);
        domain.propensity = d.value("propensity", 1.0);
        domain.life_stage = d.value("life_stage", "mature");
        spec.domains.push_back(std::move(domain));
    }
    if (!doc.contains("exchange") || !doc["exchange"].is_array())
        throw ParseError("scenario: missing 'exchange' matrix");
    for (const auto& row : doc["exchange"])
        spec.exchange.push_back(row.get<std::vector<double>>());
    spec.validate();
    return spec;
}

ScenarioSpec ScenarioSpec::from_json_file(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(detail::read_file(path), nullptr, true,
                                    /*ignore_comments=*/true);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("scenario '" + path + "': " + e.what());
    }
    return from_json(doc);
}

nlohmann::json ScenarioSpec::to_json() const {
    nlohmann::json domains_json = nlohmann::json::array();
    for (const ScenarioDomain& d : domains)
        domains_json.push_back({{"id", d.id},
                                {"sub_discipline", d.sub_discipline},
                                {"discipline", d.discipline},
                                {"volume_t0", d.volume_t0},
                                {"growth", d.growth},
                                {"propensity", d.propensity},
                                {"life_stage", d.life_stage}});
    return {{"seed", seed},
            {"start_year", start_year},
            {"years", years},
            {"domains", std::move(domains_json)},
            {"exchange", exchange}};
}

PeriodSpec ScenarioSpec::base_period() const {
    return {start_year, start_year, start_year + 1, start_year + 1};
}

namespace {

// Cohort sizes per domain per year offset, compounding by the planted growth.
std::vector<std::vector<std::uint64_t>> cohort_sizes(const ScenarioSpec& spec) {
    std::vector<std::vector<std::uint64_t>> sizes(spec.domains.size());
    for (std::size_t d = 0; d < spec.domains.size(); ++d) {
        sizes[d].resize(spec.years + 1);
        sizes[d][0] = spec.domains[d].volume_t0;
        for (int t = 1; t <= spec.years; ++t)
            sizes[d][t] = static_cast<std::uint64_t>(
                std::llround(spec.domains[d].growth * static_cast<double>(sizes[d][t - 1])));
    }
    return sizes;
}

}  // namespace

Corpus generate(const ScenarioSpec& spec) {
    spec.validate();
    const std::size_t n = spec.domains.size();

    Nomenclature::Builder builder;
    std::vector<std::string> disciplines, subs;
    for (const ScenarioDomain& d : spec.domains) {
        if (std::find(disciplines.begin(), disciplines.end(), d.discipline) == disciplines.end()) {
            builder.discipline(d.discipline);
            disciplines.push_back(d.discipline);
        }
    }
    for (const ScenarioDomain& d : spec.domains) {
        if (std::find(subs.begin(), subs.end(), d.sub_discipline) == subs.end()) {
            builder.sub_discipline(d.sub_discipline, "", d.discipline);
            subs.push_back(d.sub_discipline);
        }
    }
    for (const ScenarioDomain& d : spec.domains) builder.specialty(d.id, "", d.sub_discipline);
    Nomenclature nomenclature = builder.build();

    auto sizes = cohort_sizes(spec);

    // Article layout is fixed up front: domain-major, then year, then rank.
    // Index arithmetic keeps generation parallel-safe and order-deterministic.
    std::vector<std::vector<std::uint64_t>> offsets(n);
    std::uint64_t total_articles = 0;
    for (std::size_t d = 0; d < n; ++d) {
        offsets[d].resize(spec.years + 1);
        for (int t = 0; t <= spec.years; ++t) {
            offsets[d][t] = total_articles;
            total_articles += sizes[d][t];
        }
    }

    std::vector<Article> articles(total_articles);
    std::vector<std::uint32_t> specialty_index(n);
    for (std::size_t d = 0; d < n; ++d)
        specialty_index[d] =
            static_cast<std::uint32_t>(nomenclature.index_of(spec.domains[d].id, Level::specialty));

    detail::parallel_shards(n, [&](std::size_t d) {
        for (int t = 0; t <= spec.years; ++t) {
            for (std::uint64_t k = 0; k < sizes[d][t]; ++k) {
                Article& article = articles[offsets[d][t] + k];
                article.id = spec.domains[d].id + "_y" + std::to_string(spec.start_year + t) +
                             "_" + std::to_string(k);
                article.year = spec.start_year + t;
                article.memberships = {{specialty_index[d], 1.0}};
            }
        }
    });

    // References: every citing article of year t emits round(kappa*) distinct
    // references into year t-1, cited domain drawn from the exchange row.
    std::vector<std::vector<CitationEdge>> edge_blocks(n);
    detail::parallel_shards(n, [&](std::size_t d) {
        const std::vector<double>& row = spec.exchange[d];
        const std::uint64_t refs =
            static_cast<std::uint64_t>(std::llround(spec.domains[d].propensity));
        if (refs == 0) return;
        // Deterministic fallback order: descending share, index as tiebreak.
        std::vector<std::size_t> by_share(n);
        std::iota(by_share.begin(), by_share.end(), std::size_t{0});
        std::stable_sort(by_share.begin(), by_share.end(),
                         [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });

        auto& block = edge_blocks[d];
        std::vector<std::uint64_t> chosen;
        for (int t = 1; t <= spec.years; ++t) {
            if (sizes[d][t] == 0) continue;
            std::uint64_t reachable = 0;
            for (std::size_t target = 0; target < n; ++target) {
                if (row[target] <= 0.0) continue;
                if (sizes[target][t - 1] == 0)
                    throw InfeasibleSpecError("domain '" + spec.domains[d].id +
                                              "' targets '" + spec.domains[target].id +
                                              "' whose cohort " +
                                              std::to_string(spec.start_year + t - 1) +
                                              " is empty");
                reachable += sizes[target][t - 1];
            }
            if (reachable < refs)
                throw InfeasibleSpecError("domain '" + spec.domains[d].id + "' needs " +
                                          std::to_string(refs) +
                                          " distinct targets but only " +
                                          std::to_string(reachable) + " are reachable");
            detail::Rng rng(detail::mix_seed(spec.seed, d, static_cast<std::uint64_t>(t)));
            for (std::uint64_t k = 0; k < sizes[d][t]; ++k) {
                const std::uint32_t citing =
                    static_cast<std::uint32_t>(offsets[d][t] + k);
                chosen.clear();
                for (std::uint64_t r = 0; r < refs; ++r) {
                    std::uint64_t cited = 0;
                    bool placed = false;
                    for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
                        std::size_t target = detail::sample_index(rng, row, 1.0);
                        if (sizes[target][t - 1] == 0) continue;
                        cited = offsets[target][t - 1] + rng.next_below(sizes[target][t - 1]);
                        placed = std::find(chosen.begin(), chosen.end(), cited) == chosen.end();
                    }
                    if (!placed) {
                        // Tight cohorts: take the first unused target in share order.
                        for (std::size_t target : by_share) {
                            if (row[target] <= 0.0) break;
                            for (std::uint64_t c = 0; c < sizes[target][t - 1] && !placed; ++c) {
                                cited = offsets[target][t - 1] + c;
                                placed = std::find(chosen.begin(), chosen.end(), cited) ==
                                         chosen.end();
                            }
                            if (placed) break;
                        }
                    }
                    if (!placed)
                        throw InfeasibleSpecError("domain '" + spec.domains[d].id +
                                                  "' cannot place " + std::to_string(refs) +
                                                  " distinct references");
                    chosen.push_back(cited);
                    block.push_back({citing, static_cast<std::uint32_t>(cited), 1.0});
                }
            }
        }
    });

    std::vector<CitationEdge> edges;
    std::size_t total_edges = 0;
    for (const auto& block : edge_blocks) total_edges += block.size();
    edges.reserve(total_edges);
    for (auto& block : edge_blocks) edges.insert(edges.end(), block.begin(), block.end());

    IngestStats stats;
    stats.article_lines = stats.articles = total_articles;
    stats.edge_lines = stats.edges_kept = edges.size();
    return Corpus(std::move(nomenclature), std::move(articles), std::move(edges), stats);
}

MetricsSet oracle_metrics(const Corpus& corpus, Level level, const PeriodSpec& period) {
    if (corpus.edge_count() > kOracleEdgeLimit)
        throw SizeLimitError("oracle limited to " + std::to_string(kOracleEdgeLimit) +
                             " edges, corpus has " + std::to_string(corpus.edge_count()));
    period.validate();
    const Nomenclature& nom = corpus.nomenclature();
    const int n = nom.count(level);
    const double tau0 = period.cited_years();
    const double tau1 = period.citing_years();

    // Everything below re-derives the indicators from first principles by
    // walking articles and edges; it deliberately shares no computation with
    // the flow/normalize/metrics path.
    auto domains_of = [&](std::uint32_t article) {
        std::vector<std::pair<int, double>> out;
        for (const Membership& m : corpus.articles()[article].memberships) {
            int mapped = level == Level::specialty
                             ? static_cast<int>(m.domain)
                             : nom.ancestor_of_specialty(m.domain, level);
            bool merged = false;
            for (auto& [d, w] : out)
                if (d == mapped) {
                    w += m.weight;
                    merged = true;
                    break;
                }
            if (!merged) out.emplace_back(mapped, m.weight);
        }
        return out;
    };

    std::vector<double> vol0(n, 0.0), vol1(n, 0.0);
    for (std::uint32_t a = 0; a < corpus.article_count(); ++a) {
        int year = corpus.articles()[a].year;
        if (period.contains_cited(year))
            for (auto [d, w] : domains_of(a)) vol0[d] += w;
        if (period.contains_citing(year))
            for (auto [d, w] : domains_of(a)) vol1[d] += w;
    }

    std::vector<double> received(n, 0.0), emitted(n, 0.0);
    for (const CitationEdge& edge : corpus.edges()) {
        if (!period.contains_citing(corpus.articles()[edge.citing].year)) continue;
        if (!period.contains_cited(corpus.articles()[edge.cited].year)) continue;
        for (auto [dc, wc] : domains_of(edge.citing))
            for (auto [dd, wd] : domains_of(edge.cited)) {
                emitted[dc] += edge.weight * wc * wd;
                received[dd] += edge.weight * wc * wd;
            }
    }

    double total = 0.0, vol0_s = 0.0, vol1_s = 0.0;
    for (int d = 0; d < n; ++d) {
        total += emitted[d];
        vol0_s += vol0[d];
        vol1_s += vol1[d];
    }
    if (total == 0.0) throw EmptyWindowError("oracle: no active citation edge in window");

    // Citing-side re-weighting per edge share, using the propensity at the
    // reporting level.
    std::vector<double> propensity(n, 0.0);
    for (int d = 0; d < n; ++d)
        if (vol1[d] > 0.0) propensity[d] = emitted[d] / vol1[d];
    const double propensity_s = total / vol1_s;
    std::vector<double> received_norm(n, 0.0), emitted_norm(n, 0.0);
    for (const CitationEdge& edge : corpus.edges()) {
        if (!period.contains_citing(corpus.articles()[edge.citing].year)) continue;
        if (!period.contains_cited(corpus.articles()[edge.cited].year)) continue;
        for (auto [dc, wc] : domains_of(edge.citing)) {
            double factor = propensity[dc] > 0.0 ? propensity_s / propensity[dc] : 0.0;
            for (auto [dd, wd] : domains_of(edge.cited)) {
                double share = edge.weight * wc * wd * factor;
                emitted_norm[dc] += share;
                received_norm[dd] += share;
            }
        }
    }
    double total_norm = 0.0;
    for (int d = 0; d < n; ++d) total_norm += emitted_norm[d];

    MetricsSet set;
    set.level = level;
    set.normalization_level = level;
    set.period = period;
    set.science.impact = (total / tau1) / (vol0_s / tau0);
    set.science.growth = (vol1_s / tau1) / (vol0_s / tau0);
    set.science.kappa = total / vol1_s;
    set.science.impact_norm = (total_norm / tau1) / (vol0_s / tau0);

    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (int d = 0; d < n; ++d) {
        DomainMetrics m;
        m.domain_id = nom.id(level, d);
        m.citable_weight = vol0[d] / tau0;
        m.citing_weight = vol1[d] / tau1;
        m.zero_outflow = emitted[d] == 0.0;
        m.zero_inflow = received[d] == 0.0;
        m.defined = vol0[d] > 0.0;
        if (!m.defined) {
            ++set.excluded_zero_volume;
            m.impact = m.growth = m.growth_rel = m.balance = m.kappa = m.kappa_rel = nan;
            m.impact_rel = m.balance_norm = m.impact_rel_norm = m.kappa_rel_norm = nan;
            m.log_growth = m.log_balance = m.log_impact = nan;
            set.domains.push_back(std::move(m));
            continue;
        }
        m.impact = (received[d] / tau1) / (vol0[d] / tau0);
        m.growth = (vol1[d] / tau1) / (vol0[d] / tau0);
        m.balance = emitted[d] > 0.0 ? received[d] / emitted[d] : nan;
        m.kappa = vol1[d] > 0.0 ? emitted[d] / vol1[d] : 0.0;
        m.growth_rel = m.growth / set.science.growth;
        m.kappa_rel = m.kappa / set.science.kappa;
        m.impact_rel = m.impact / set.science.impact;
        m.balance_norm = emitted_norm[d] > 0.0 ? received_norm[d] / emitted_norm[d] : nan;
        m.impact_rel_norm =
            ((received_norm[d] / tau1) / (vol0[d] / tau0)) / set.science.impact_norm;
        m.kappa_rel_norm =
            vol1[d] > 0.0 ? (emitted_norm[d] / vol1[d]) / (total_norm / vol1_s) : nan;
        if (m.zero_outflow) ++set.excluded_zero_outflow;
        if (m.zero_inflow) ++set.excluded_zero_inflow;
        m.log_growth = std::log(m.growth_rel);
        m.log_balance = std::isnan(m.balance_norm) ? nan : std::log(m.balance_norm);
        m.log_impact = m.log_growth + m.log_balance;
        m.log_defined = std::isfinite(m.log_growth) && std::isfinite(m.log_balance);
        set.domains.push_back(std::move(m));
    }
    return set;
}

}  // namespace citeflow

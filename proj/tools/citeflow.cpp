// citeflow: citation-flow analytics engine.
//
// Subcommands: ingest, metrics, series, synth, verify. Every command is
// deterministic given its inputs (and seed); outputs carry no timestamps.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "citeflow/aggregate.hpp"
#include "citeflow/chart.hpp"
#include "citeflow/corpus.hpp"
#include "citeflow/metrics.hpp"
#include "citeflow/store.hpp"
#include "citeflow/summary.hpp"
#include "citeflow/synth.hpp"

namespace {

using namespace citeflow;

constexpr int kExitParse = 2;
constexpr int kExitSchema = 3;
constexpr int kExitEmptyWindow = 4;
constexpr int kExitUsage = 64;

int g_log_level = 1;  // 0 quiet, 1 info, 2 debug

void log_info(const std::string& message) {
    if (g_log_level >= 1) std::cerr << message << '\n';
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const ParseError*>(&e)) return kExitParse;
    if (dynamic_cast<const HierarchyError*>(&e) || dynamic_cast<const UnknownDomainError*>(&e) ||
        dynamic_cast<const DanglingEdgeError*>(&e))
        return kExitSchema;
    if (dynamic_cast<const EmptyWindowError*>(&e)) return kExitEmptyWindow;
    return 1;
}

std::pair<int, int> parse_year_range(const std::string& text) {
    auto pos = text.find("..");
    if (pos == std::string::npos)
        throw CLI::ValidationError("year range", "expected FROM..TO, got '" + text + "'");
    try {
        int from = std::stoi(text.substr(0, pos));
        int to = std::stoi(text.substr(pos + 2));
        return {from, to};
    } catch (const std::exception&) {
        throw CLI::ValidationError("year range", "expected FROM..TO, got '" + text + "'");
    }
}

Level parse_level_arg(const std::string& text) {
    auto level = parse_level(text);
    if (!level)
        throw CLI::ValidationError(
            "level", "expected specialty | sub-discipline | discipline, got '" + text + "'");
    return *level;
}

struct IngestArgs {
    std::string articles, edges, nomenclature, out;
    std::string dangling = "drop";
    double min_activity = 0.0;
};

int cmd_ingest(const IngestArgs& args) {
    DanglingPolicy policy =
        args.dangling == "strict" ? DanglingPolicy::strict : DanglingPolicy::drop;
    Corpus corpus = load_corpus(args.articles, args.edges, args.nomenclature, policy);
    const IngestStats& s = corpus.stats();
    std::cout << "articles: " << s.articles << " (weights rescaled: " << s.rescaled_memberships
              << ")\n";
    std::cout << "edges: lines " << s.edge_lines << ", kept " << s.edges_kept << ", duplicates "
              << s.duplicate_edges << ", dangling " << s.dangling_edges << ", self-citations "
              << s.self_citations << "\n";
    if (args.min_activity > 0.0) {
        FilterReport report;
        corpus = filter_low_activity(corpus, args.min_activity, report);
        std::cout << "low-activity filter (threshold " << args.min_activity << "): removed "
                  << report.removed_domains.size() << " domains, dropped "
                  << report.dropped_articles << " articles, " << report.dropped_edges
                  << " edges\n";
        if (report.empty_corpus)
            std::cerr << "warning: every domain fell below the activity threshold; store is "
                         "empty\n";
    }
    save_store(corpus, args.out);
    std::cout << "store: " << args.out << " (" << std::filesystem::file_size(args.out)
              << " bytes)\n";
    return 0;
}

struct MetricsArgs {
    std::string store, out, flows_prefix;
    std::string level, normalize_level;
    std::string cited, citing;
    bool exclude_self_flows = false;
};

int cmd_metrics(const MetricsArgs& args) {
    Level level = parse_level_arg(args.level);
    Level norm_level = args.normalize_level.empty() ? level : parse_level_arg(args.normalize_level);
    auto [cited_from, cited_to] = parse_year_range(args.cited);
    auto [citing_from, citing_to] = parse_year_range(args.citing);
    PeriodSpec period{cited_from, cited_to, citing_from, citing_to};
    period.validate();

    Corpus corpus = load_store(args.store);
    if (norm_level != level)
        std::cerr << "warning: normalization level (" << level_name(norm_level)
                  << ") differs from reporting level (" << level_name(level)
                  << "); the normalized decomposition identities are not expected to hold\n";
    FlowBuildOptions options;
    options.include_diagonal = !args.exclude_self_flows;
    PipelineArtifacts artifacts = run_pipeline(corpus, level, period, norm_level, options);
    write_metrics_tsv(artifacts.metrics, args.out);
    if (!args.flows_prefix.empty()) {
        write_flow_tsv(artifacts.gross, args.flows_prefix + "_gross.tsv");
        write_flow_sidecar(artifacts.gross, args.flows_prefix + "_gross.json");
        write_flow_tsv(artifacts.normalized, args.flows_prefix + "_normalized.tsv");
        write_flow_sidecar(artifacts.normalized, args.flows_prefix + "_normalized.json");
        write_propensity_tsv(artifacts.propensity, args.flows_prefix + "_propensity.tsv");
    }
    std::cout << verify_propositions(artifacts.metrics).to_string() << '\n';
    std::cout << "metrics: " << args.out << " (" << artifacts.metrics.domains.size()
              << " domains)\n";
    return 0;
}

struct SeriesArgs {
    std::string store, out, chart;
    std::string level, normalize_level;
    std::string cited_years;
    int window = 1;
    std::string weighting = "volume";
    bool alt_headers = false;
    bool exclude_self_flows = false;
};

int cmd_series(const SeriesArgs& args) {
    Level level = parse_level_arg(args.level);
    auto [from, to] = parse_year_range(args.cited_years);
    auto scheme = parse_weight_scheme(args.weighting);
    if (!scheme)
        throw CLI::ValidationError("weighting",
                                   "expected volume | citing | uniform, got '" + args.weighting +
                                       "'");
    Corpus corpus = load_store(args.store);
    SeriesSpec spec;
    spec.cited_from = from;
    spec.cited_to = to;
    spec.window_years = args.window;
    spec.weighting = *scheme;
    spec.flow_options.include_diagonal = !args.exclude_self_flows;
    if (!args.normalize_level.empty()) spec.normalization_level = parse_level_arg(args.normalize_level);
    std::vector<SeriesPoint> points = time_series(corpus, level, spec);

    std::size_t computed = 0;
    for (const SeriesPoint& p : points) {
        if (p.summary) ++computed;
        if (!p.error.empty())
            log_info("year " + std::to_string(p.cited_year) + ": " + p.error);
        else if (p.reduced_window)
            log_info("year " + std::to_string(p.cited_year) + ": reduced citation window");
    }
    if (computed == 0) {
        std::cerr << "error: no cited year computable\n";
        return kExitEmptyWindow;
    }
    write_series_tsv(points, args.out, args.alt_headers);
    if (!args.chart.empty()) write_series_chart_svg(points, args.chart);
    std::cout << "series: " << args.out << " (" << computed << "/" << points.size()
              << " years computed)\n";
    return 0;
}

struct SynthArgs {
    std::string scenario, out, tsv_dir;
    std::int64_t seed = -1;
};

int cmd_synth(const SynthArgs& args) {
    ScenarioSpec spec = ScenarioSpec::from_json_file(args.scenario);
    if (args.seed >= 0) spec.seed = static_cast<std::uint64_t>(args.seed);
    Corpus corpus = generate(spec);
    save_store(corpus, args.out);
    std::cout << "generated: " << corpus.article_count() << " articles, " << corpus.edge_count()
              << " edges (seed " << spec.seed << ")\n";
    std::cout << "store: " << args.out << '\n';
    if (!args.tsv_dir.empty()) {
        std::filesystem::create_directories(args.tsv_dir);
        write_articles_tsv(corpus, args.tsv_dir + "/articles.tsv");
        write_edges_tsv(corpus, args.tsv_dir + "/edges.tsv");
        write_nomenclature_json(corpus.nomenclature(), args.tsv_dir + "/nomenclature.json");
        std::cout << "tsv: " << args.tsv_dir << "/{articles.tsv,edges.tsv,nomenclature.json}\n";
    }
    return 0;
}

struct VerifyArgs {
    std::string store;
    std::string cited, citing;
};

int cmd_verify(const VerifyArgs& args) {
    auto [cited_from, cited_to] = parse_year_range(args.cited);
    auto [citing_from, citing_to] = parse_year_range(args.citing);
    PeriodSpec period{cited_from, cited_to, citing_from, citing_to};
    period.validate();
    Corpus corpus = load_store(args.store);

    int failed_suites = 0;
    std::vector<std::string> failed_names;
    auto finish_suite = [&](const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << '\n';
        if (!ok) {
            ++failed_suites;
            failed_names.push_back(name);
        }
    };

    // Suite 1: decomposition identities per level, plus a reference-count
    // cross-check of the propensity. A gross corpus carries unit edge
    // weights, so kappa from edge counts must agree with kappa from flow
    // weights; tampered weights surface here as a first-identity residual.
    {
        bool ok = true;
        double worst = 0.0;
        std::string detail;
        try {
            for (Level level : kAllLevels) {
                PipelineArtifacts artifacts = run_pipeline(corpus, level, period, level);
                PropositionReport report = verify_propositions(artifacts.metrics);
                worst = std::max({worst, report.max_gross, report.max_relative,
                                  report.max_normalized});
                if (!report.pass) ok = false;

                FlowBuildOptions unit;
                unit.unit_weights = true;
                FlowMatrix counts = build_flow_matrix(corpus, level, period, unit);
                const double citing_years = period.citing_years();
                for (const DomainMetrics& m : artifacts.metrics.domains) {
                    if (!m.defined || m.zero_outflow || !std::isfinite(m.balance)) continue;
                    int d = static_cast<int>(&m - artifacts.metrics.domains.data());
                    double citing_raw = m.citing_weight * citing_years;
                    if (citing_raw <= 0.0) continue;
                    double kappa_count = counts.out_flow(d) / citing_raw;
                    double lhs = m.impact;
                    double rhs = m.growth * m.balance * kappa_count;
                    double res = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
                    worst = std::max(worst, res);
                    if (res >= 1e-9) ok = false;
                }
                for (const DomainMetrics& m : artifacts.metrics.domains) {
                    if (!m.defined || m.zero_outflow) continue;
                    if (std::abs(m.kappa_rel_norm - 1.0) > 1e-12) ok = false;
                    worst = std::max(worst, std::abs(m.kappa_rel_norm - 1.0));
                }
            }
            detail = "max residual " + std::to_string(worst);
        } catch (const Error& e) {
            ok = false;
            detail = e.what();
        }
        finish_suite("propositions", ok, detail);
    }

    // Suite 2: aggregation stability.
    {
        bool ok = true;
        std::string detail;
        try {
            StabilityReport report = check_aggregation_stability(corpus, period);
            double worst_commute = 0.0, worst_stability = 0.0;
            for (const auto& step : report.steps) {
                worst_commute = std::max(worst_commute, step.max_commute_residual);
                worst_stability = std::max({worst_stability, step.max_impact_residual,
                                            step.max_growth_residual, step.max_kappa_residual});
            }
            ok = worst_commute < 1e-9 && worst_stability < 1e-12;
            detail = "commute residual " + std::to_string(worst_commute) + ", stability residual " +
                     std::to_string(worst_stability);
        } catch (const Error& e) {
            ok = false;
            detail = e.what();
        }
        finish_suite("aggregation", ok, detail);
    }

    // Suite 3: brute-force oracle equivalence (skipped above the size limit).
    {
        bool ok = true;
        std::string detail;
        if (corpus.edge_count() > kOracleEdgeLimit) {
            detail = "skipped (corpus above oracle size limit)";
        } else {
            try {
                double worst = 0.0;
                for (Level level : kAllLevels) {
                    MetricsSet expected = oracle_metrics(corpus, level, period);
                    MetricsSet actual = compute_metrics_pipeline(corpus, level, period, level);
                    for (std::size_t d = 0; d < expected.domains.size(); ++d) {
                        const DomainMetrics& a = expected.domains[d];
                        const DomainMetrics& b = actual.domains[d];
                        for (auto [x, y] :
                             {std::pair{a.impact, b.impact}, {a.growth, b.growth},
                              {a.balance, b.balance}, {a.kappa, b.kappa},
                              {a.impact_rel, b.impact_rel}, {a.balance_norm, b.balance_norm},
                              {a.impact_rel_norm, b.impact_rel_norm}}) {
                            if (std::isnan(x) && std::isnan(y)) continue;
                            double res = std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-300});
                            worst = std::max(worst, res);
                            if (res >= 1e-9) ok = false;
                        }
                    }
                }
                detail = "max deviation " + std::to_string(worst);
            } catch (const Error& e) {
                ok = false;
                detail = e.what();
            }
        }
        finish_suite("oracle", ok, detail);
    }

    if (failed_suites > 0) {
        std::cerr << "failed suites:";
        for (const std::string& name : failed_names) std::cerr << ' ' << name;
        std::cerr << '\n';
    }
    return failed_suites;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"citation-flow analytics: citing-side normalized impacts, growth/balance "
                 "decomposition, and science-level change statistics"};
    app.require_subcommand(1);
    app.add_option("--log-level", g_log_level, "0 quiet, 1 info, 2 debug")
        ->envname("CITEFLOW_LOG_LEVEL");

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "validate input files and build a corpus store");
    ingest->add_option("--articles", ingest_args.articles, "articles TSV")->required();
    ingest->add_option("--edges", ingest_args.edges, "citation edges TSV")->required();
    ingest->add_option("--nomenclature", ingest_args.nomenclature, "nomenclature JSON")->required();
    ingest->add_option("--out", ingest_args.out, "output store path")->required();
    ingest->add_option("--dangling", ingest_args.dangling, "drop | strict")
        ->check(CLI::IsMember({"drop", "strict"}));
    ingest->add_option("--min-activity", ingest_args.min_activity,
                       "remove specialties with total flow below this threshold");

    MetricsArgs metrics_args;
    auto* metrics = app.add_subcommand("metrics", "per-domain indicators for one period pair");
    metrics->add_option("--store", metrics_args.store)->required();
    metrics->add_option("--level", metrics_args.level, "reporting level")->required();
    metrics->add_option("--cited", metrics_args.cited, "cited years FROM..TO")->required();
    metrics->add_option("--citing", metrics_args.citing, "citing years FROM..TO")->required();
    metrics->add_option("--normalize-level", metrics_args.normalize_level,
                        "propensity level (defaults to --level)");
    metrics->add_option("--out", metrics_args.out, "metrics TSV")->required();
    metrics->add_option("--flows-prefix", metrics_args.flows_prefix,
                        "also export flow matrices and the propensity table");
    metrics->add_flag("--exclude-self-flows", metrics_args.exclude_self_flows,
                      "drop domain self-citations (sensitivity analysis)");

    SeriesArgs series_args;
    auto* series = app.add_subcommand("series", "per-cited-year summary statistics");
    series->add_option("--store", series_args.store)->required();
    series->add_option("--level", series_args.level)->required();
    series->add_option("--cited-years", series_args.cited_years, "cited years FROM..TO")->required();
    series->add_option("--window", series_args.window, "citing window length in years");
    series->add_option("--weighting", series_args.weighting, "volume | citing | uniform");
    series->add_option("--normalize-level", series_args.normalize_level);
    series->add_option("--out", series_args.out, "series TSV")->required();
    series->add_option("--chart", series_args.chart, "optional SVG chart path");
    series->add_flag("--alt-headers", series_args.alt_headers,
                     "use the legacy column names (varlnimnor, ...)");
    series->add_flag("--exclude-self-flows", series_args.exclude_self_flows);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus from a scenario");
    synth->add_option("--scenario", synth_args.scenario, "scenario JSON")->required();
    synth->add_option("--seed", synth_args.seed, "override the scenario seed");
    synth->add_option("--out", synth_args.out, "output store path")->required();
    synth->add_option("--tsv-dir", synth_args.tsv_dir, "also write the corpus as TSV files");

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "run identity, aggregation and oracle suites");
    verify->add_option("--store", verify_args.store)->required();
    verify->add_option("--cited", verify_args.cited, "cited years FROM..TO")->required();
    verify->add_option("--citing", verify_args.citing, "citing years FROM..TO")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(ingest)) return cmd_ingest(ingest_args);
        if (app.got_subcommand(metrics)) return cmd_metrics(metrics_args);
        if (app.got_subcommand(series)) return cmd_series(series_args);
        if (app.got_subcommand(synth)) return cmd_synth(synth_args);
        if (app.got_subcommand(verify)) return cmd_verify(verify_args);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return kExitUsage;
}

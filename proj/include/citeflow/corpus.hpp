#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "citeflow/nomenclature.hpp"

namespace citeflow {

// A (cited, citing) pair of year windows, both inclusive. Citations run from
// the citing window back into the cited window; the windows may have
// different lengths, so all rates downstream work on annualized volumes.
struct PeriodSpec {
    int cited_start = 0;
    int cited_end = 0;
    int citing_start = 0;
    int citing_end = 0;

    void validate() const;

    int cited_years() const { return cited_end - cited_start + 1; }
    int citing_years() const { return citing_end - citing_start + 1; }
    bool contains_cited(int year) const { return year >= cited_start && year <= cited_end; }
    bool contains_citing(int year) const { return year >= citing_start && year <= citing_end; }

    bool operator==(const PeriodSpec&) const = default;

    std::string to_string() const;
};

// Fractional assignment of an article to one specialty.
struct Membership {
    std::uint32_t domain = 0;  // specialty index in the nomenclature
    double weight = 1.0;       // in (0,1]; per-article weights sum to 1
};

struct Article {
    std::string id;
    int year = 0;
    std::vector<Membership> memberships;  // specialty level; coarser levels are derived
};

struct CitationEdge {
    std::uint32_t citing = 0;
    std::uint32_t cited = 0;
    double weight = 1.0;  // 1.0 on ingestion; real weight only on derived corpora
};

enum class DanglingPolicy { strict, drop };

struct IngestStats {
    std::uint64_t article_lines = 0;
    std::uint64_t articles = 0;
    std::uint64_t rescaled_memberships = 0;  // articles whose weights did not sum to 1
    std::uint64_t edge_lines = 0;
    std::uint64_t edges_kept = 0;
    std::uint64_t duplicate_edges = 0;
    std::uint64_t dangling_edges = 0;
    std::uint64_t self_citations = 0;

    bool operator==(const IngestStats&) const = default;
};

// Immutable corpus: articles, citation edges and the nomenclature, with
// per-level fractional memberships precomputed. Safe to share across threads
// after construction.
class Corpus {
public:
    Corpus() = default;
    Corpus(Nomenclature nomenclature, std::vector<Article> articles,
           std::vector<CitationEdge> edges, IngestStats stats = {});

    const Nomenclature& nomenclature() const { return nomenclature_; }
    std::span<const Article> articles() const { return articles_; }
    std::span<const CitationEdge> edges() const { return edges_; }
    const IngestStats& stats() const { return stats_; }

    std::size_t article_count() const { return articles_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    // Fractional memberships of one article at any level (derived from the
    // specialty assignment through the embedded scheme).
    std::span<const Membership> memberships(std::uint32_t article, Level level) const;

    int article_index(const std::string& id) const;  // -1 when unknown

    int min_year() const { return min_year_; }
    int max_year() const { return max_year_; }

private:
    void build_derived();

    Nomenclature nomenclature_;
    std::vector<Article> articles_;
    std::vector<CitationEdge> edges_;
    IngestStats stats_;

    // Per-level CSR over articles.
    struct LevelIndex {
        std::vector<std::uint64_t> offsets;
        std::vector<Membership> entries;
    };
    std::array<LevelIndex, kLevelCount> levels_;
    std::unordered_map<std::string, std::uint32_t> by_id_;
    int min_year_ = 0;
    int max_year_ = 0;
};

std::vector<Article> load_articles(const std::string& path, const Nomenclature& nomenclature,
                                   IngestStats& stats);
std::vector<CitationEdge> load_edges(const std::string& path,
                                     const std::unordered_map<std::string, std::uint32_t>& index,
                                     DanglingPolicy policy, IngestStats& stats);
Corpus load_corpus(const std::string& articles_path, const std::string& edges_path,
                   const std::string& nomenclature_path, DanglingPolicy policy = DanglingPolicy::drop);

void write_articles_tsv(const Corpus& corpus, const std::string& path);
void write_edges_tsv(const Corpus& corpus, const std::string& path);
void write_nomenclature_json(const Nomenclature& nomenclature, const std::string& path);

struct FilterReport {
    std::vector<std::string> removed_domains;  // specialty ids
    std::uint64_t dropped_articles = 0;
    std::uint64_t dropped_edges = 0;
    std::uint64_t rescaled_memberships = 0;
    bool empty_corpus = false;
};

// Removes specialties whose total gross flow (incoming plus outgoing, over
// all edges) is below `threshold`. Articles whose only membership was removed
// are dropped together with their edges; remaining memberships are rescaled.
// Single pass: activity is measured once on the input corpus.
Corpus filter_low_activity(const Corpus& corpus, double threshold, FilterReport& report);

}  // namespace citeflow

#include "citeflow/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "citeflow/detail/text.hpp"

namespace citeflow {

namespace {

constexpr double kWeightSumTolerance = 1e-9;

void require_open(const std::ofstream& out, const std::string& path) {
    if (!out) throw Error("cannot write '" + path + "'");
}

}  // namespace

void PeriodSpec::validate() const {
    if (cited_start > cited_end)
        throw ParseError("period: cited_start > cited_end");
    if (citing_start > citing_end)
        throw ParseError("period: citing_start > citing_end");
    if (cited_end > citing_start)
        throw ParseError("period: cited window must precede or touch the citing window start");
}

std::string PeriodSpec::to_string() const {
    return std::to_string(cited_start) + ".." + std::to_string(cited_end) + " cited by " +
           std::to_string(citing_start) + ".." + std::to_string(citing_end);
}

Corpus::Corpus(Nomenclature nomenclature, std::vector<Article> articles,
               std::vector<CitationEdge> edges, IngestStats stats)
    : nomenclature_(std::move(nomenclature)),
      articles_(std::move(articles)),
      edges_(std::move(edges)),
      stats_(stats) {
    build_derived();
}

void Corpus::build_derived() {
    const int n_specialties = nomenclature_.count(Level::specialty);
    min_year_ = articles_.empty() ? 0 : articles_.front().year;
    max_year_ = min_year_;
    by_id_.reserve(articles_.size());
    for (std::uint32_t a = 0; a < articles_.size(); ++a) {
        const Article& article = articles_[a];
        min_year_ = std::min(min_year_, article.year);
        max_year_ = std::max(max_year_, article.year);
        if (!by_id_.emplace(article.id, a).second)
            throw ParseError("duplicate article id '" + article.id + "'");
        double sum = 0.0;
        for (const Membership& m : article.memberships) {
            if (m.domain >= static_cast<std::uint32_t>(n_specialties))
                throw UnknownDomainError("article '" + article.id +
                                         "' references an out-of-range specialty index");
            if (!(m.weight > 0.0))
                throw ParseError("article '" + article.id + "' has a non-positive membership weight");
            sum += m.weight;
        }
        if (article.memberships.empty())
            throw ParseError("article '" + article.id + "' has no memberships");
        if (std::abs(sum - 1.0) > kWeightSumTolerance)
            throw ParseError("article '" + article.id + "' membership weights sum to " +
                             detail::format_double(sum));
    }
    for (const CitationEdge& edge : edges_) {
        if (edge.citing >= articles_.size() || edge.cited >= articles_.size())
            throw ParseError("edge references an unknown article index");
        if (edge.citing == edge.cited)
            throw ParseError("self-citation edge in corpus");
        if (!(edge.weight > 0.0)) throw ParseError("edge with non-positive weight");
    }

    // Specialty memberships verbatim; coarser levels accumulate through the
    // embedded parent chain (weights per level keep summing to 1).
    for (Level level : kAllLevels) {
        LevelIndex& index = levels_[static_cast<int>(level)];
        index.offsets.assign(articles_.size() + 1, 0);
        index.entries.clear();
        std::vector<double> acc(nomenclature_.count(level), 0.0);
        std::vector<int> touched;
        for (std::uint32_t a = 0; a < articles_.size(); ++a) {
            for (const Membership& m : articles_[a].memberships) {
                int target = level == Level::specialty
                                 ? static_cast<int>(m.domain)
                                 : nomenclature_.ancestor_of_specialty(m.domain, level);
                if (acc[target] == 0.0) touched.push_back(target);
                acc[target] += m.weight;
            }
            std::sort(touched.begin(), touched.end());
            for (int d : touched) {
                index.entries.push_back({static_cast<std::uint32_t>(d), acc[d]});
                acc[d] = 0.0;
            }
            touched.clear();
            index.offsets[a + 1] = index.entries.size();
        }
    }
}

std::span<const Membership> Corpus::memberships(std::uint32_t article, Level level) const {
    const LevelIndex& index = levels_[static_cast<int>(level)];
    return std::span<const Membership>(index.entries.data() + index.offsets[article],
                                       index.entries.data() + index.offsets[article + 1]);
}

int Corpus::article_index(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? -1 : static_cast<int>(it->second);
}

std::vector<Article> load_articles(const std::string& path, const Nomenclature& nomenclature,
                                   IngestStats& stats) {
    std::string content = detail::read_file(path);
    std::vector<Article> articles;
    detail::for_each_data_line(content, [&](std::size_t line_no, std::string_view line) {
        ++stats.article_lines;
        auto cols = detail::split(line, '\t');
        if (cols.size() != 3)
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected id<TAB>year<TAB>memberships");
        Article article;
        article.id = std::string(cols[0]);
        if (article.id.empty())
            throw ParseError(path + ":" + std::to_string(line_no) + ": empty article id");
        article.year = static_cast<int>(detail::parse_int(cols[1], "year"));
        double sum = 0.0;
        for (std::string_view part : detail::split(cols[2], ';')) {
            if (part.empty())
                throw ParseError(path + ":" + std::to_string(line_no) + ": empty membership entry");
            std::string_view domain = part;
            double weight = 1.0;
            if (std::size_t colon = part.rfind(':'); colon != std::string_view::npos) {
                domain = part.substr(0, colon);
                weight = detail::parse_double(part.substr(colon + 1), "membership weight");
            }
            int index = nomenclature.index_of(std::string(domain), Level::specialty);
            if (index < 0)
                throw UnknownDomainError(path + ":" + std::to_string(line_no) +
                                         ": unknown specialty '" + std::string(domain) + "'");
            if (!(weight > 0.0))
                throw ParseError(path + ":" + std::to_string(line_no) +
                                 ": non-positive membership weight");
            article.memberships.push_back({static_cast<std::uint32_t>(index), weight});
            sum += weight;
        }
        // Noisy exports ship weights that do not sum to 1; rescale and tally.
        if (std::abs(sum - 1.0) > kWeightSumTolerance) {
            for (Membership& m : article.memberships) m.weight /= sum;
            ++stats.rescaled_memberships;
        }
        articles.push_back(std::move(article));
        ++stats.articles;
    });
    return articles;
}

std::vector<CitationEdge> load_edges(const std::string& path,
                                     const std::unordered_map<std::string, std::uint32_t>& index,
                                     DanglingPolicy policy, IngestStats& stats) {
    std::string content = detail::read_file(path);
    std::vector<CitationEdge> edges;
    std::unordered_set<std::uint64_t> seen;
    detail::for_each_data_line(content, [&](std::size_t line_no, std::string_view line) {
        ++stats.edge_lines;
        auto cols = detail::split(line, '\t');
        if (cols.size() != 2)
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected citing_id<TAB>cited_id");
        auto citing = index.find(std::string(cols[0]));
        auto cited = index.find(std::string(cols[1]));
        if (citing == index.end() || cited == index.end()) {
            if (policy == DanglingPolicy::strict)
                throw DanglingEdgeError(path + ":" + std::to_string(line_no) +
                                        ": unknown article '" +
                                        std::string(citing == index.end() ? cols[0] : cols[1]) + "'");
            ++stats.dangling_edges;
            return;
        }
        if (citing->second == cited->second) {
            ++stats.self_citations;
            return;
        }
        std::uint64_t key = (static_cast<std::uint64_t>(citing->second) << 32) | cited->second;
        if (!seen.insert(key).second) {
            ++stats.duplicate_edges;
            return;
        }
        edges.push_back({citing->second, cited->second, 1.0});
        ++stats.edges_kept;
    });
    return edges;
}

Corpus load_corpus(const std::string& articles_path, const std::string& edges_path,
                   const std::string& nomenclature_path, DanglingPolicy policy) {
    Nomenclature nomenclature = load_nomenclature(nomenclature_path);
    IngestStats stats;
    std::vector<Article> articles = load_articles(articles_path, nomenclature, stats);
    std::unordered_map<std::string, std::uint32_t> index;
    index.reserve(articles.size());
    for (std::uint32_t a = 0; a < articles.size(); ++a) {
        if (!index.emplace(articles[a].id, a).second)
            throw ParseError("duplicate article id '" + articles[a].id + "'");
    }
    std::vector<CitationEdge> edges = load_edges(edges_path, index, policy, stats);
    return Corpus(std::move(nomenclature), std::move(articles), std::move(edges), stats);
}

void write_articles_tsv(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require_open(out, path);
    out << "# id\tyear\tmemberships (specialty:weight;...)\n";
    const Nomenclature& nom = corpus.nomenclature();
    for (const Article& article : corpus.articles()) {
        out << article.id << '\t' << article.year << '\t';
        bool first = true;
        for (const Membership& m : article.memberships) {
            if (!first) out << ';';
            first = false;
            out << nom.id(Level::specialty, m.domain);
            if (m.weight != 1.0) out << ':' << detail::format_double(m.weight);
        }
        out << '\n';
    }
}

void write_edges_tsv(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require_open(out, path);
    out << "# citing_id\tcited_id\n";
    auto articles = corpus.articles();
    for (const CitationEdge& edge : corpus.edges())
        out << articles[edge.citing].id << '\t' << articles[edge.cited].id << '\n';
}

void write_nomenclature_json(const Nomenclature& nomenclature, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require_open(out, path);
    out << nomenclature.to_json().dump(2) << '\n';
}

Corpus filter_low_activity(const Corpus& corpus, double threshold, FilterReport& report) {
    report = FilterReport{};
    if (threshold <= 0.0) {
        return corpus;  // identity
    }
    const Nomenclature& nom = corpus.nomenclature();
    const int n = nom.count(Level::specialty);

    // Activity = incoming + outgoing gross flow over every edge, fractional
    // counting, no period window: the filter is corpus-level preprocessing.
    std::vector<double> activity(n, 0.0);
    for (const CitationEdge& edge : corpus.edges()) {
        for (const Membership& mc : corpus.memberships(edge.citing, Level::specialty))
            activity[mc.domain] += edge.weight * mc.weight;
        for (const Membership& md : corpus.memberships(edge.cited, Level::specialty))
            activity[md.domain] += edge.weight * md.weight;
    }

    std::vector<bool> drop(n, false);
    int kept = 0;
    for (int d = 0; d < n; ++d) {
        drop[d] = activity[d] < threshold;
        if (drop[d])
            report.removed_domains.push_back(nom.id(Level::specialty, d));
        else
            ++kept;
    }
    if (report.removed_domains.empty()) return corpus;
    if (kept == 0) {
        report.empty_corpus = true;
        report.dropped_articles = corpus.article_count();
        report.dropped_edges = corpus.edge_count();
        return Corpus();
    }

    Nomenclature filtered_nom = nom.drop_specialties(drop);
    std::vector<int> remap(n, -1);
    for (int d = 0; d < n; ++d)
        if (!drop[d]) remap[d] = filtered_nom.index_of(nom.id(Level::specialty, d), Level::specialty);

    std::vector<Article> articles;
    std::vector<std::int64_t> article_remap(corpus.article_count(), -1);
    for (std::uint32_t a = 0; a < corpus.article_count(); ++a) {
        const Article& article = corpus.articles()[a];
        Article out;
        out.id = article.id;
        out.year = article.year;
        double sum = 0.0;
        for (const Membership& m : article.memberships) {
            if (drop[m.domain]) continue;
            out.memberships.push_back({static_cast<std::uint32_t>(remap[m.domain]), m.weight});
            sum += m.weight;
        }
        if (out.memberships.empty()) {
            ++report.dropped_articles;  // exclusive member of a removed domain
            continue;
        }
        if (std::abs(sum - 1.0) > kWeightSumTolerance) {
            for (Membership& m : out.memberships) m.weight /= sum;
            ++report.rescaled_memberships;
        }
        article_remap[a] = static_cast<std::int64_t>(articles.size());
        articles.push_back(std::move(out));
    }

    std::vector<CitationEdge> edges;
    for (const CitationEdge& edge : corpus.edges()) {
        std::int64_t citing = article_remap[edge.citing];
        std::int64_t cited = article_remap[edge.cited];
        if (citing < 0 || cited < 0) {
            ++report.dropped_edges;
            continue;
        }
        edges.push_back({static_cast<std::uint32_t>(citing), static_cast<std::uint32_t>(cited),
                         edge.weight});
    }
    return Corpus(std::move(filtered_nom), std::move(articles), std::move(edges), corpus.stats());
}

}  // namespace citeflow

#include "citeflow/flows.hpp"

#include <algorithm>
#include <fstream>

#include "citeflow/detail/parallel.hpp"
#include "citeflow/detail/text.hpp"

namespace citeflow {

namespace {

constexpr int kDenseDomainLimit = 2000;
constexpr std::size_t kShardCount = 64;
constexpr std::size_t kParallelEdgeThreshold = 200000;

// Per-shard accumulation buffer; merged into the FlowMatrix in shard order so
// the result is identical for any thread count.
struct Partial {
    std::vector<double> dense;
    std::unordered_map<std::uint64_t, double> sparse;
    std::uint64_t active = 0;
    std::uint64_t inactive = 0;
};

}  // namespace

FlowMatrix::FlowMatrix(Level level, PeriodSpec period, MatrixKind kind,
                       std::vector<std::string> domain_ids)
    : level_(level),
      period_(period),
      kind_(kind),
      domain_ids_(std::move(domain_ids)),
      n_(static_cast<int>(domain_ids_.size())),
      dense_storage_(n_ <= kDenseDomainLimit) {
    if (dense_storage_) dense_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
    citable_volume_.assign(n_, 0.0);
    citing_volume_.assign(n_, 0.0);
}

double FlowMatrix::at(int citing, int cited) const {
    if (dense_storage_) return dense_[static_cast<std::size_t>(citing) * n_ + cited];
    auto it = sparse_.find(static_cast<std::uint64_t>(citing) * n_ + cited);
    return it == sparse_.end() ? 0.0 : it->second;
}

void FlowMatrix::add(int citing, int cited, double weight) {
    if (dense_storage_)
        dense_[static_cast<std::size_t>(citing) * n_ + cited] += weight;
    else
        sparse_[static_cast<std::uint64_t>(citing) * n_ + cited] += weight;
}

void FlowMatrix::scale_row(int citing, double factor) {
    if (dense_storage_) {
        double* row = dense_.data() + static_cast<std::size_t>(citing) * n_;
        for (int j = 0; j < n_; ++j) row[j] *= factor;
    } else {
        std::uint64_t lo = static_cast<std::uint64_t>(citing) * n_;
        for (auto& [key, v] : sparse_)
            if (key >= lo && key < lo + static_cast<std::uint64_t>(n_)) v *= factor;
    }
}

double FlowMatrix::in_flow(int domain) const {
    double sum = 0.0;
    if (dense_storage_) {
        for (int i = 0; i < n_; ++i) sum += dense_[static_cast<std::size_t>(i) * n_ + domain];
    } else {
        for (const auto& [key, v] : sparse_)
            if (static_cast<int>(key % n_) == domain) sum += v;
    }
    return sum;
}

double FlowMatrix::out_flow(int domain) const {
    double sum = 0.0;
    if (dense_storage_) {
        const double* row = dense_.data() + static_cast<std::size_t>(domain) * n_;
        for (int j = 0; j < n_; ++j) sum += row[j];
    } else {
        std::uint64_t lo = static_cast<std::uint64_t>(domain) * n_;
        for (const auto& [key, v] : sparse_)
            if (key >= lo && key < lo + static_cast<std::uint64_t>(n_)) sum += v;
    }
    return sum;
}

double FlowMatrix::total_flow() const {
    double sum = 0.0;
    if (dense_storage_) {
        for (double v : dense_) sum += v;
    } else {
        for (const auto& [key, v] : sparse_) sum += v;
    }
    return sum;
}

double FlowMatrix::citable_volume_total() const {
    double sum = 0.0;
    for (double v : citable_volume_) sum += v;
    return sum;
}

double FlowMatrix::citing_volume_total() const {
    double sum = 0.0;
    for (double v : citing_volume_) sum += v;
    return sum;
}

void FlowMatrix::set_volumes(std::vector<double> citable, std::vector<double> citing) {
    citable_volume_ = std::move(citable);
    citing_volume_ = std::move(citing);
}

void FlowMatrix::set_edge_counts(std::uint64_t active, std::uint64_t inactive) {
    active_edges_ = active;
    inactive_edges_ = inactive;
}

FlowMatrix build_flow_matrix(const Corpus& corpus, Level level, const PeriodSpec& period,
                             const FlowBuildOptions& options) {
    period.validate();
    const Nomenclature& nom = corpus.nomenclature();
    const int n = nom.count(level);
    FlowMatrix fm(level, period, MatrixKind::gross, nom.ids(level));

    auto edges = corpus.edges();
    auto articles = corpus.articles();
    const bool dense = fm.dense();

    auto accumulate = [&](std::size_t begin, std::size_t end, Partial& partial) {
        for (std::size_t e = begin; e < end; ++e) {
            const CitationEdge& edge = edges[e];
            if (!period.contains_citing(articles[edge.citing].year) ||
                !period.contains_cited(articles[edge.cited].year)) {
                ++partial.inactive;
                continue;
            }
            ++partial.active;
            double w = options.unit_weights ? 1.0 : edge.weight;
            for (const Membership& mc : corpus.memberships(edge.citing, level)) {
                for (const Membership& md : corpus.memberships(edge.cited, level)) {
                    if (!options.include_diagonal && mc.domain == md.domain) continue;
                    double share = w * mc.weight * md.weight;
                    if (dense)
                        partial.dense[static_cast<std::size_t>(mc.domain) * n + md.domain] += share;
                    else
                        partial.sparse[static_cast<std::uint64_t>(mc.domain) * n + md.domain] +=
                            share;
                }
            }
        }
    };

    std::uint64_t active = 0, inactive = 0;
    if (edges.size() >= kParallelEdgeThreshold) {
        std::vector<Partial> partials(kShardCount);
        detail::parallel_shards(kShardCount, [&](std::size_t s) {
            auto [begin, end] = detail::shard_range(edges.size(), kShardCount, s);
            if (dense) partials[s].dense.assign(static_cast<std::size_t>(n) * n, 0.0);
            accumulate(begin, end, partials[s]);
        });
        for (std::size_t s = 0; s < kShardCount; ++s) {
            const Partial& p = partials[s];
            active += p.active;
            inactive += p.inactive;
            if (dense) {
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        double v = p.dense[static_cast<std::size_t>(i) * n + j];
                        if (v != 0.0) fm.add(i, j, v);
                    }
            } else {
                for (const auto& [key, v] : p.sparse)
                    fm.add(static_cast<int>(key / n), static_cast<int>(key % n), v);
            }
        }
    } else {
        Partial partial;
        if (dense) partial.dense.assign(static_cast<std::size_t>(n) * n, 0.0);
        accumulate(0, edges.size(), partial);
        active = partial.active;
        inactive = partial.inactive;
        if (dense) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double v = partial.dense[static_cast<std::size_t>(i) * n + j];
                    if (v != 0.0) fm.add(i, j, v);
                }
        } else {
            for (const auto& [key, v] : partial.sparse)
                fm.add(static_cast<int>(key / n), static_cast<int>(key % n), v);
        }
    }
    if (active == 0)
        throw EmptyWindowError("no active citation edge in window (" + period.to_string() + ")");
    fm.set_edge_counts(active, inactive);

    // Membership-weighted article counts, annualized by window length.
    std::vector<double> citable(n, 0.0), citing(n, 0.0);
    for (std::uint32_t a = 0; a < articles.size(); ++a) {
        const bool in_cited = period.contains_cited(articles[a].year);
        const bool in_citing = period.contains_citing(articles[a].year);
        if (!in_cited && !in_citing) continue;
        for (const Membership& m : corpus.memberships(a, level)) {
            if (in_cited) citable[m.domain] += m.weight;
            if (in_citing) citing[m.domain] += m.weight;
        }
    }
    const double cited_years = period.cited_years();
    const double citing_years = period.citing_years();
    for (int d = 0; d < n; ++d) {
        citable[d] /= cited_years;
        citing[d] /= citing_years;
    }
    fm.set_volumes(std::move(citable), std::move(citing));
    return fm;
}

namespace {

int require_domain(const FlowMatrix& fm, const std::string& domain_id) {
    const auto& ids = fm.domain_ids();
    auto it = std::find(ids.begin(), ids.end(), domain_id);
    if (it == ids.end())
        throw UnknownDomainError("domain '" + domain_id + "' not present at level " +
                                 level_name(fm.level()));
    return static_cast<int>(it - ids.begin());
}

}  // namespace

double in_flow(const FlowMatrix& fm, const std::string& domain_id) {
    return fm.in_flow(require_domain(fm, domain_id));
}

double out_flow(const FlowMatrix& fm, const std::string& domain_id) {
    return fm.out_flow(require_domain(fm, domain_id));
}

ScienceTotals science_totals(const FlowMatrix& fm) {
    return {fm.total_flow(), fm.citable_volume_total(), fm.citing_volume_total()};
}

void write_flow_tsv(const FlowMatrix& fm, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << "citing\\cited";
    for (const std::string& id : fm.domain_ids()) out << '\t' << id;
    out << '\n';
    for (int i = 0; i < fm.domain_count(); ++i) {
        out << fm.domain_ids()[i];
        for (int j = 0; j < fm.domain_count(); ++j)
            out << '\t' << detail::format_double(fm.at(i, j));
        out << '\n';
    }
}

void write_flow_sidecar(const FlowMatrix& fm, const std::string& path) {
    nlohmann::json doc{
        {"level", level_name(fm.level())},
        {"kind", fm.kind() == MatrixKind::gross ? "gross" : "normalized"},
        {"period",
         {{"cited_start", fm.period().cited_start},
          {"cited_end", fm.period().cited_end},
          {"citing_start", fm.period().citing_start},
          {"citing_end", fm.period().citing_end}}},
        {"domains", fm.domain_ids()},
        {"active_edges", fm.active_edges()},
        {"inactive_edges", fm.inactive_edges()},
    };
    if (fm.normalization_level())
        doc["normalization_level"] = level_name(*fm.normalization_level());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << doc.dump(2) << '\n';
}

}  // namespace citeflow

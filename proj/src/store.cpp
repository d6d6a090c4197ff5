#include "citeflow/store.hpp"

#include <cstring>
#include <fstream>

#include "citeflow/detail/text.hpp"

namespace citeflow {

namespace {

// Format version 1; layout documented in docs/store_format.md. All integers
// little-endian fixed width, written column by column.
constexpr char kMagic[4] = {'C', 'F', 'S', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void write_column(std::ofstream& out, const std::vector<T>& column) {
    static_assert(std::is_trivially_copyable_v<T>);
    write_pod(out, static_cast<std::uint64_t>(column.size()));
    out.write(reinterpret_cast<const char*>(column.data()),
              static_cast<std::streamsize>(column.size() * sizeof(T)));
}

void write_string(std::ofstream& out, const std::string& s) {
    write_pod(out, static_cast<std::uint64_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw ParseError("store: truncated file");
    return value;
}

template <typename T>
std::vector<T> read_column(std::ifstream& in) {
    auto size = read_pod<std::uint64_t>(in);
    std::vector<T> column(size);
    in.read(reinterpret_cast<char*>(column.data()),
            static_cast<std::streamsize>(size * sizeof(T)));
    if (!in) throw ParseError("store: truncated column");
    return column;
}

std::string read_string(std::ifstream& in) {
    auto size = read_pod<std::uint64_t>(in);
    std::string s(size, '\0');
    in.read(s.data(), static_cast<std::streamsize>(size));
    if (!in) throw ParseError("store: truncated string");
    return s;
}

}  // namespace

void save_store(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path + "'");
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, std::uint32_t{1});

    write_string(out, corpus.nomenclature().to_json().dump());

    // Article table: id blob + offsets, years, membership CSR.
    auto articles = corpus.articles();
    std::string id_blob;
    std::vector<std::uint64_t> id_offsets;
    id_offsets.reserve(articles.size() + 1);
    id_offsets.push_back(0);
    for (const Article& a : articles) {
        id_blob += a.id;
        id_offsets.push_back(id_blob.size());
    }
    write_string(out, id_blob);
    write_column(out, id_offsets);

    std::vector<std::int32_t> years(articles.size());
    std::vector<std::uint64_t> memb_offsets(articles.size() + 1, 0);
    std::vector<std::uint32_t> memb_domains;
    std::vector<double> memb_weights;
    for (std::size_t a = 0; a < articles.size(); ++a) {
        years[a] = articles[a].year;
        for (const Membership& m : articles[a].memberships) {
            memb_domains.push_back(m.domain);
            memb_weights.push_back(m.weight);
        }
        memb_offsets[a + 1] = memb_domains.size();
    }
    write_column(out, years);
    write_column(out, memb_offsets);
    write_column(out, memb_domains);
    write_column(out, memb_weights);

    auto edges = corpus.edges();
    std::vector<std::uint32_t> citing(edges.size()), cited(edges.size());
    std::vector<double> weights(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        citing[e] = edges[e].citing;
        cited[e] = edges[e].cited;
        weights[e] = edges[e].weight;
    }
    write_column(out, citing);
    write_column(out, cited);
    write_column(out, weights);

    const IngestStats& s = corpus.stats();
    for (std::uint64_t v : {s.article_lines, s.articles, s.rescaled_memberships, s.edge_lines,
                            s.edges_kept, s.duplicate_edges, s.dangling_edges, s.self_citations})
        write_pod(out, v);
    if (!out) throw Error("write failed for '" + path + "'");
}

Corpus load_store(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open store '" + path + "'");
    char magic[4];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ParseError("'" + path + "' is not a corpus store");
    auto version = read_pod<std::uint32_t>(in);
    if (version != 1)
        throw ParseError("store version " + std::to_string(version) + " not supported");

    Nomenclature nomenclature = Nomenclature::from_json(nlohmann::json::parse(read_string(in)));

    std::string id_blob = read_string(in);
    auto id_offsets = read_column<std::uint64_t>(in);
    auto years = read_column<std::int32_t>(in);
    auto memb_offsets = read_column<std::uint64_t>(in);
    auto memb_domains = read_column<std::uint32_t>(in);
    auto memb_weights = read_column<double>(in);
    if (id_offsets.size() != years.size() + 1 || memb_offsets.size() != years.size() + 1 ||
        memb_domains.size() != memb_weights.size())
        throw ParseError("store: inconsistent article columns");

    std::vector<Article> articles(years.size());
    for (std::size_t a = 0; a < articles.size(); ++a) {
        articles[a].id = id_blob.substr(id_offsets[a], id_offsets[a + 1] - id_offsets[a]);
        articles[a].year = years[a];
        for (std::uint64_t m = memb_offsets[a]; m < memb_offsets[a + 1]; ++m)
            articles[a].memberships.push_back({memb_domains[m], memb_weights[m]});
    }

    auto citing = read_column<std::uint32_t>(in);
    auto cited = read_column<std::uint32_t>(in);
    auto weights = read_column<double>(in);
    if (citing.size() != cited.size() || citing.size() != weights.size())
        throw ParseError("store: inconsistent edge columns");
    std::vector<CitationEdge> edges(citing.size());
    for (std::size_t e = 0; e < edges.size(); ++e)
        edges[e] = {citing[e], cited[e], weights[e]};

    IngestStats stats;
    stats.article_lines = read_pod<std::uint64_t>(in);
    stats.articles = read_pod<std::uint64_t>(in);
    stats.rescaled_memberships = read_pod<std::uint64_t>(in);
    stats.edge_lines = read_pod<std::uint64_t>(in);
    stats.edges_kept = read_pod<std::uint64_t>(in);
    stats.duplicate_edges = read_pod<std::uint64_t>(in);
    stats.dangling_edges = read_pod<std::uint64_t>(in);
    stats.self_citations = read_pod<std::uint64_t>(in);
    return Corpus(std::move(nomenclature), std::move(articles), std::move(edges), stats);
}

}  // namespace citeflow

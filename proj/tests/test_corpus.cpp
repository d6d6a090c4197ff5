#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "citeflow/corpus.hpp"
#include "citeflow/flows.hpp"
#include "test_support.hpp"

using namespace citeflow;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("citeflow_corpus_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& content) {
        fs::path p = path / name;
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p.string();
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

const char* kNomenclatureJson = R"({
  "disciplines": [{
    "id": "d0", "label": "D",
    "sub_disciplines": [
      {"id": "sd0", "label": "SD0", "specialties": [{"id": "A", "label": ""}, {"id": "B", "label": ""}]},
      {"id": "sd1", "label": "SD1", "specialties": [{"id": "C", "label": ""}, {"id": "E", "label": ""}]}
    ]
  }]
})";

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("nomenclature: minimal well-formed tree") {
    TempDir dir;
    Nomenclature nom = load_nomenclature(dir.file("nom.json", kNomenclatureJson));
    CHECK(nom.count(Level::discipline) == 1);
    CHECK(nom.count(Level::sub_discipline) == 2);
    CHECK(nom.count(Level::specialty) == 4);
    CHECK(nom.index_of("C", Level::specialty) >= 0);
    int c = nom.index_of("C", Level::specialty);
    CHECK(nom.id(Level::sub_discipline, nom.ancestor_of_specialty(c, Level::sub_discipline)) ==
          "sd1");
    CHECK(nom.id(Level::discipline, nom.ancestor_of_specialty(c, Level::discipline)) == "d0");
    CHECK(!nom.find("nope"));
}

TEST_CASE("nomenclature: specialty with two parents is rejected") {
    TempDir dir;
    const char* multi_parent = R"({
      "disciplines": [{
        "id": "d0", "label": "",
        "sub_disciplines": [
          {"id": "sd0", "label": "", "specialties": [{"id": "A", "label": ""}]},
          {"id": "sd1", "label": "", "specialties": [{"id": "A", "label": ""}]}
        ]
      }]
    })";
    CHECK_THROWS_AS(load_nomenclature(dir.file("nom.json", multi_parent)), HierarchyError);
}

TEST_CASE("nomenclature: empty file is a parse error") {
    TempDir dir;
    CHECK_THROWS_AS(load_nomenclature(dir.file("nom.json", "")), ParseError);
    CHECK_THROWS_AS(load_nomenclature(dir.file("nom2.json", "{}")), ParseError);
}

TEST_CASE("nomenclature: childless inner nodes violate the embedding") {
    const char* childless = R"({
      "disciplines": [{
        "id": "d0", "label": "",
        "sub_disciplines": [{"id": "sd0", "label": "", "specialties": []}]
      }]
    })";
    TempDir dir;
    CHECK_THROWS_AS(load_nomenclature(dir.file("nom.json", childless)), HierarchyError);
}

TEST_CASE("articles: weights kept, split memberships, rescaling") {
    TempDir dir;
    Nomenclature nom = load_nomenclature(dir.file("nom.json", kNomenclatureJson));
    IngestStats stats;
    std::string path = dir.file("articles.tsv",
                                "# comment\n"
                                "p1\t2000\tA\n"
                                "p2\t2000\tA:0.5;B:0.5\n"
                                "p3\t2001\tA:0.6;B:0.6\n");
    auto articles = load_articles(path, nom, stats);
    REQUIRE(articles.size() == 3);
    CHECK(stats.rescaled_memberships == 1);
    CHECK(articles[0].memberships.size() == 1);
    CHECK(articles[0].memberships[0].weight == 1.0);
    CHECK(articles[1].memberships[0].weight == 0.5);
    // 0.6/0.6 rescaled to 0.5/0.5; re-sum check
    CHECK(articles[2].memberships[0].weight == doctest::Approx(0.5).epsilon(1e-12));
    double sum = 0.0;
    for (const auto& m : articles[2].memberships) sum += m.weight;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("articles: unknown domain and malformed rows") {
    TempDir dir;
    Nomenclature nom = load_nomenclature(dir.file("nom.json", kNomenclatureJson));
    IngestStats stats;
    CHECK_THROWS_AS(
        load_articles(dir.file("a1.tsv", "p1\t2000\tZZZ\n"), nom, stats), UnknownDomainError);
    CHECK_THROWS_AS(load_articles(dir.file("a2.tsv", "p1\t2000\n"), nom, stats), ParseError);
    CHECK_THROWS_AS(load_articles(dir.file("a3.tsv", "p1\tyear\tA\n"), nom, stats), ParseError);
    // sub-discipline ids are not valid article memberships
    CHECK_THROWS_AS(
        load_articles(dir.file("a4.tsv", "p1\t2000\tsd0\n"), nom, stats), UnknownDomainError);
}

TEST_CASE("edges: dedup, drop policy, self-citations, conservation") {
    TempDir dir;
    Nomenclature nom = load_nomenclature(dir.file("nom.json", kNomenclatureJson));
    IngestStats stats;
    auto articles = load_articles(
        dir.file("a.tsv", "p1\t2000\tA\np2\t2001\tB\np3\t2001\tC\n"), nom, stats);
    std::unordered_map<std::string, std::uint32_t> index;
    for (std::uint32_t i = 0; i < articles.size(); ++i) index.emplace(articles[i].id, i);

    std::string edges_path = dir.file("e.tsv",
                                      "p2\tp1\n"
                                      "p2\tp1\n"     // duplicate
                                      "p3\tp1\n"
                                      "p3\tp3\n"     // self-citation
                                      "p3\tghost\n"  // dangling
    );
    auto edges = load_edges(edges_path, index, DanglingPolicy::drop, stats);
    CHECK(edges.size() == 2);
    CHECK(edges[0].weight == 1.0);
    CHECK(stats.duplicate_edges == 1);
    CHECK(stats.self_citations == 1);
    CHECK(stats.dangling_edges == 1);
    // conservation: every input line is accounted for
    CHECK(stats.edge_lines ==
          stats.edges_kept + stats.duplicate_edges + stats.self_citations + stats.dangling_edges);

    IngestStats strict_stats;
    CHECK_THROWS_AS(load_edges(edges_path, index, DanglingPolicy::strict, strict_stats),
                    DanglingEdgeError);
}

TEST_CASE("edge conservation through the flow stage") {
    TempDir dir;
    Nomenclature nom = load_nomenclature(dir.file("nom.json", kNomenclatureJson));
    IngestStats stats;
    auto articles = load_articles(
        dir.file("a.tsv", "p1\t2000\tA\np2\t2001\tB\np3\t2005\tC\n"), nom, stats);
    std::unordered_map<std::string, std::uint32_t> index;
    for (std::uint32_t i = 0; i < articles.size(); ++i) index.emplace(articles[i].id, i);
    auto edges =
        load_edges(dir.file("e.tsv", "p2\tp1\np3\tp1\n"), index, DanglingPolicy::drop, stats);
    Corpus corpus(nom, std::move(articles), std::move(edges), stats);
    FlowMatrix fm = build_flow_matrix(corpus, Level::specialty, {2000, 2000, 2001, 2001});
    // p3 cites from outside the citing window -> inactive
    CHECK(fm.active_edges() == 1);
    CHECK(fm.inactive_edges() == 1);
    CHECK(stats.edge_lines == fm.active_edges() + fm.inactive_edges() + stats.duplicate_edges +
                                  stats.self_citations + stats.dangling_edges);
}

TEST_CASE("membership weights sum to one at every level after ingestion") {
    Corpus corpus = testing::fractionalize(generate(testing::random_scenario(99, 20, 5000)), 5);
    for (std::uint32_t a = 0; a < corpus.article_count(); ++a) {
        for (Level level : kAllLevels) {
            double sum = 0.0;
            for (const Membership& m : corpus.memberships(a, level)) sum += m.weight;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("round-trip: TSV export reloads to bit-identical flow matrices") {
    TempDir dir;
    Corpus corpus = testing::d1_corpus();
    write_articles_tsv(corpus, (dir.path / "articles.tsv").string());
    write_edges_tsv(corpus, (dir.path / "edges.tsv").string());
    write_nomenclature_json(corpus.nomenclature(), (dir.path / "nom.json").string());
    Corpus reloaded = load_corpus((dir.path / "articles.tsv").string(),
                                  (dir.path / "edges.tsv").string(),
                                  (dir.path / "nom.json").string());
    for (Level level : kAllLevels) {
        FlowMatrix a = build_flow_matrix(corpus, level, testing::d1_period());
        FlowMatrix b = build_flow_matrix(reloaded, level, testing::d1_period());
        REQUIRE(a.domain_count() == b.domain_count());
        for (int i = 0; i < a.domain_count(); ++i) {
            CHECK(a.citable_volume(i) == b.citable_volume(i));
            CHECK(a.citing_volume(i) == b.citing_volume(i));
            for (int j = 0; j < a.domain_count(); ++j) CHECK(a.at(i, j) == b.at(i, j));
        }
    }
}

TEST_CASE("period validation") {
    CHECK_THROWS_AS((PeriodSpec{2001, 2000, 2002, 2003}.validate()), ParseError);
    CHECK_THROWS_AS((PeriodSpec{2000, 2002, 2001, 2003}.validate()), ParseError);
    CHECK_NOTHROW((PeriodSpec{2000, 2001, 2001, 2003}.validate()));  // touching windows are fine
}

TEST_CASE("filter_low_activity: identity, removal, empty") {
    Corpus corpus = testing::witness_corpus();  // a,b,c with 6 edges

    FilterReport report;
    Corpus same = filter_low_activity(corpus, 0.0, report);
    CHECK(same.article_count() == corpus.article_count());
    CHECK(report.removed_domains.empty());

    // activity: a=3, b=3, c=6; threshold 5 removes a and b
    Corpus filtered = filter_low_activity(corpus, 5.0, report);
    CHECK(report.removed_domains == std::vector<std::string>{"a", "b"});
    CHECK(filtered.nomenclature().count(Level::specialty) == 1);
    CHECK(filtered.nomenclature().count(Level::sub_discipline) == 1);  // P pruned
    CHECK(report.dropped_articles > 0);
    CHECK(report.dropped_edges == 6);  // every edge touched a removed article

    Corpus empty = filter_low_activity(corpus, 100.0, report);
    CHECK(report.empty_corpus);
    CHECK(empty.article_count() == 0);
}

TEST_CASE("filter_low_activity: shared memberships are rescaled, not dropped") {
    Nomenclature::Builder builder;
    builder.discipline("d0");
    builder.sub_discipline("sd0", "", "d0");
    builder.specialty("hot", "", "sd0");
    builder.specialty("cold", "", "sd0");
    Nomenclature nom = builder.build();
    std::uint32_t hot = static_cast<std::uint32_t>(nom.index_of("hot", Level::specialty));
    std::uint32_t cold = static_cast<std::uint32_t>(nom.index_of("cold", Level::specialty));
    std::vector<Article> articles = {
        {"p0", 2000, {{hot, 0.5}, {cold, 0.5}}},
        {"p1", 2001, {{hot, 1.0}}},
        {"p2", 2001, {{hot, 1.0}}},
    };
    std::vector<CitationEdge> edges = {{1, 0, 1.0}, {2, 0, 1.0}};
    Corpus corpus(nom, articles, edges);
    // activity: hot = 2 (citing) + 1 (cited half) = 3, cold = 1
    FilterReport report;
    Corpus filtered = filter_low_activity(corpus, 2.0, report);
    CHECK(report.removed_domains == std::vector<std::string>{"cold"});
    CHECK(filtered.article_count() == 3);  // p0 keeps its hot membership
    CHECK(report.rescaled_memberships == 1);
    auto memb = filtered.memberships(filtered.article_index("p0"), Level::specialty);
    REQUIRE(memb.size() == 1);
    CHECK(memb[0].weight == 1.0);
}

}  // TEST_SUITE

#include <doctest.h>

#include <algorithm>

#include "citeflow/aggregate.hpp"
#include "citeflow/metrics.hpp"
#include "citeflow/normalize.hpp"
#include "test_support.hpp"

using namespace citeflow;
using testing::rel_diff;

namespace {

int domain_index(const FlowMatrix& fm, const std::string& id) {
    auto it = std::find(fm.domain_ids().begin(), fm.domain_ids().end(), id);
    REQUIRE(it != fm.domain_ids().end());
    return static_cast<int>(it - fm.domain_ids().begin());
}

}  // namespace

TEST_SUITE("normalize") {

TEST_CASE("D1 propensities and re-weighted flows") {
    Corpus corpus = testing::d1_corpus();
    FlowMatrix gross = build_flow_matrix(corpus, Level::specialty, testing::d1_period());
    CitingPropensity prop = compute_propensity(gross);
    int x = domain_index(gross, "X"), y = domain_index(gross, "Y");
    CHECK(prop.w[x] == 1.0);
    CHECK(prop.w[y] == 2.0);
    CHECK(prop.w_science == 8.0 / 6.0);

    FlowMatrix normalized = normalize_edges(gross, prop);
    CHECK(normalized.kind() == MatrixKind::normalized);
    CHECK(normalized.normalization_level() == Level::specialty);
    CHECK(normalized.at(x, y) == doctest::Approx(16.0 / 3.0).epsilon(1e-15));
    CHECK(normalized.at(y, x) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
    CHECK(normalized.in_flow(x) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));

    // kappa check: normalized out-flow per citing article equals w_science.
    CHECK(normalized.out_flow(x) / 4.0 == doctest::Approx(prop.w_science).epsilon(1e-15));
    CHECK(normalized.out_flow(y) / 2.0 == doctest::Approx(prop.w_science).epsilon(1e-15));

    // Total flow conservation.
    CHECK(rel_diff(normalized.total_flow(), gross.total_flow()) < 1e-12);
}

TEST_CASE("single domain: propensity equals the science average") {
    Corpus corpus = generate(testing::steady_scenario(1, 1, 5));
    FlowMatrix gross = build_flow_matrix(corpus, Level::specialty, {2000, 2000, 2001, 2001});
    CitingPropensity prop = compute_propensity(gross);
    CHECK(prop.w[0] == prop.w_science);
}

TEST_CASE("uniform propensity is a fixed point") {
    Corpus corpus = generate(testing::steady_scenario(4, 1, 6));
    FlowMatrix gross = build_flow_matrix(corpus, Level::specialty, {2000, 2000, 2001, 2001});
    CitingPropensity prop = compute_propensity(gross);
    FlowMatrix normalized = normalize_edges(gross, prop);
    for (int i = 0; i < gross.domain_count(); ++i)
        for (int j = 0; j < gross.domain_count(); ++j)
            CHECK(normalized.at(i, j) == gross.at(i, j));
}

TEST_CASE("relative propensity is one for every domain after normalization") {
    for (std::uint64_t seed : {21u, 22u, 23u, 24u, 25u, 26u, 27u, 28u}) {
        Corpus corpus =
            testing::fractionalize(generate(testing::random_scenario(seed, 50, 30000)), seed);
        PeriodSpec period{2000, 2000, 2001, 2001};
        for (Level level : kAllLevels) {
            FlowMatrix gross = build_flow_matrix(corpus, level, period);
            CitingPropensity prop = compute_propensity(gross);
            FlowMatrix normalized = normalize_edges(gross, prop);
            const double citing_years = period.citing_years();
            double w_norm_science =
                normalized.total_flow() / (normalized.citing_volume_total() * citing_years);
            for (int d = 0; d < gross.domain_count(); ++d) {
                double citing_raw = normalized.citing_volume(d) * citing_years;
                if (normalized.out_flow(d) == 0.0 || citing_raw == 0.0) continue;
                double kappa_rel = (normalized.out_flow(d) / citing_raw) / w_norm_science;
                CHECK(std::abs(kappa_rel - 1.0) < 1e-12);
            }
            CHECK(rel_diff(normalized.total_flow(), gross.total_flow()) < 1e-9);
        }
    }
}

TEST_CASE("idempotence: re-normalizing a normalized matrix changes nothing") {
    Corpus corpus = generate(testing::random_scenario(31, 30, 20000));
    FlowMatrix gross = build_flow_matrix(corpus, Level::specialty, {2000, 2000, 2001, 2001});
    FlowMatrix normalized = normalize_edges(gross, compute_propensity(gross));

    // Propensity of the normalized matrix is uniform by construction; feed it
    // back through the same row scaling.
    CitingPropensity prop;
    prop.level = normalized.level();
    prop.domain_ids = normalized.domain_ids();
    const double citing_years = normalized.period().citing_years();
    for (int d = 0; d < normalized.domain_count(); ++d) {
        double citing_raw = normalized.citing_volume(d) * citing_years;
        prop.w.push_back(citing_raw > 0.0 ? normalized.out_flow(d) / citing_raw : 0.0);
    }
    prop.w_science =
        normalized.total_flow() / (normalized.citing_volume_total() * citing_years);
    FlowMatrix again(Level::specialty, normalized.period(), MatrixKind::gross,
                     normalized.domain_ids());
    // normalize_edges requires a gross matrix; copy entries and volumes over.
    normalized.for_each([&](int i, int j, double v) { again.add(i, j, v); });
    std::vector<double> citable, citing;
    for (int d = 0; d < normalized.domain_count(); ++d) {
        citable.push_back(normalized.citable_volume(d));
        citing.push_back(normalized.citing_volume(d));
    }
    again.set_volumes(std::move(citable), std::move(citing));
    FlowMatrix twice = normalize_edges(again, prop);
    for (int i = 0; i < normalized.domain_count(); ++i)
        for (int j = 0; j < normalized.domain_count(); ++j)
            CHECK(rel_diff(twice.at(i, j), normalized.at(i, j)) < 1e-12);
}

TEST_CASE("granularity matters unless the propensity is constant within parents") {
    PeriodSpec period{2000, 2000, 2001, 2001};

    // Unequal propensity inside discA: specialty- and discipline-level
    // normalization disagree somewhere.
    Corpus uneven = generate(testing::two_discipline_scenario(false));
    FlowMatrix gross = build_flow_matrix(uneven, Level::specialty, period);
    FlowMatrix by_specialty = normalize_edges(gross, compute_propensity(gross));
    FlowMatrix gross_disc = build_flow_matrix(uneven, Level::discipline, period);
    FlowMatrix by_discipline =
        normalize_edges(gross, compute_propensity(gross_disc), uneven.nomenclature());
    double max_gap = 0.0;
    for (int i = 0; i < gross.domain_count(); ++i)
        for (int j = 0; j < gross.domain_count(); ++j)
            max_gap = std::max(max_gap, rel_diff(by_specialty.at(i, j), by_discipline.at(i, j)));
    CHECK(max_gap > 1e-3);

    // Constant propensity within each discipline: the two levels agree.
    Corpus even = generate(testing::two_discipline_scenario(true));
    FlowMatrix gross2 = build_flow_matrix(even, Level::specialty, period);
    FlowMatrix by_specialty2 = normalize_edges(gross2, compute_propensity(gross2));
    FlowMatrix gross_disc2 = build_flow_matrix(even, Level::discipline, period);
    FlowMatrix by_discipline2 =
        normalize_edges(gross2, compute_propensity(gross_disc2), even.nomenclature());
    for (int i = 0; i < gross2.domain_count(); ++i)
        for (int j = 0; j < gross2.domain_count(); ++j)
            CHECK(rel_diff(by_specialty2.at(i, j), by_discipline2.at(i, j)) < 1e-12);
}

TEST_CASE("zero-volume and zero-propensity guards") {
    PeriodSpec period{2000, 2000, 2001, 2001};
    // Hand-built matrix: flow out of a domain with zero citing volume.
    FlowMatrix broken(Level::specialty, period, MatrixKind::gross, {"A", "B"});
    broken.add(0, 1, 3.0);
    broken.set_volumes({1.0, 1.0}, {0.0, 1.0});
    CHECK_THROWS_AS(compute_propensity(broken), ZeroVolumeError);

    // Propensity zero for a row that carries flow.
    FlowMatrix fm(Level::specialty, period, MatrixKind::gross, {"A", "B"});
    fm.add(0, 1, 3.0);
    fm.set_volumes({1.0, 1.0}, {1.0, 1.0});
    CitingPropensity prop;
    prop.level = Level::specialty;
    prop.domain_ids = {"A", "B"};
    prop.w = {0.0, 1.0};
    prop.w_science = 1.0;
    CHECK_THROWS_AS(normalize_edges(fm, prop), ZeroPropensityError);
}

TEST_CASE("domain with citing articles but no references is flagged, not fatal") {
    // z has citing-period articles that cite nothing.
    Nomenclature::Builder builder;
    builder.discipline("D");
    builder.sub_discipline("P", "", "D");
    builder.specialty("u", "", "P");
    builder.specialty("z", "", "P");
    Nomenclature nom = builder.build();
    std::uint32_t u = static_cast<std::uint32_t>(nom.index_of("u", Level::specialty));
    std::uint32_t z = static_cast<std::uint32_t>(nom.index_of("z", Level::specialty));
    std::vector<Article> articles = {
        {"u0", 2000, {{u, 1.0}}}, {"u1", 2001, {{u, 1.0}}}, {"z1", 2001, {{z, 1.0}}}};
    std::vector<CitationEdge> edges = {{1, 0, 1.0}};
    Corpus corpus(nom, articles, edges);
    FlowMatrix gross = build_flow_matrix(corpus, Level::specialty, {2000, 2000, 2001, 2001});
    CitingPropensity prop = compute_propensity(gross);
    CHECK(prop.w[z] == 0.0);
    CHECK(prop.w[u] == 1.0);
    FlowMatrix normalized = normalize_edges(gross, prop);  // zero row stays zero
    CHECK(normalized.out_flow(z) == 0.0);
}

}  // TEST_SUITE

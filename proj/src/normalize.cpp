#include "citeflow/normalize.hpp"

#include <fstream>

#include "citeflow/detail/text.hpp"

namespace citeflow {

namespace {

double citing_articles_raw(const FlowMatrix& fm, int domain) {
    // Volumes are stored annualized; scale back to a head count so the
    // propensity is references per citing article.
    return fm.citing_volume(domain) * fm.period().citing_years();
}

FlowMatrix normalize_with_factors(const FlowMatrix& gross, const CitingPropensity& propensity,
                                  const std::vector<int>& row_to_prop) {
    FlowMatrix out(gross.level(), gross.period(), MatrixKind::normalized, gross.domain_ids());
    out.set_normalization_level(propensity.level);
    std::vector<double> factor(gross.domain_count(), 1.0);
    for (int d = 0; d < gross.domain_count(); ++d) {
        double w = propensity.w[row_to_prop[d]];
        if (w > 0.0) {
            factor[d] = propensity.w_science / w;
        } else if (gross.out_flow(d) > 0.0) {
            throw ZeroPropensityError("citing domain '" + gross.domain_ids()[d] +
                                      "' carries flow but has zero propensity");
        }
        // Zero-propensity rows are all-zero and stay untouched.
    }
    gross.for_each([&](int i, int j, double v) { out.add(i, j, v * factor[i]); });
    std::vector<double> citable(gross.domain_count()), citing(gross.domain_count());
    for (int d = 0; d < gross.domain_count(); ++d) {
        citable[d] = gross.citable_volume(d);
        citing[d] = gross.citing_volume(d);
    }
    out.set_volumes(std::move(citable), std::move(citing));
    out.set_edge_counts(gross.active_edges(), gross.inactive_edges());
    return out;
}

}  // namespace

CitingPropensity compute_propensity(const FlowMatrix& gross) {
    if (gross.kind() != MatrixKind::gross)
        throw Error("propensity must be computed on a gross matrix");
    CitingPropensity prop;
    prop.level = gross.level();
    prop.domain_ids = gross.domain_ids();
    prop.w.resize(gross.domain_count(), 0.0);
    for (int d = 0; d < gross.domain_count(); ++d) {
        double out = gross.out_flow(d);
        double articles = citing_articles_raw(gross, d);
        if (out > 0.0 && articles <= 0.0)
            throw ZeroVolumeError("domain '" + gross.domain_ids()[d] +
                                  "' emits citations with zero citing volume");
        prop.w[d] = articles > 0.0 ? out / articles : 0.0;
    }
    double total_articles = gross.citing_volume_total() * gross.period().citing_years();
    if (total_articles <= 0.0)
        throw ZeroVolumeError("no citing articles in window");
    prop.w_science = gross.total_flow() / total_articles;
    return prop;
}

FlowMatrix normalize_edges(const FlowMatrix& gross, const CitingPropensity& propensity) {
    if (propensity.level != gross.level())
        throw LevelOrderError(
            "propensity level differs from the matrix level; pass the nomenclature for "
            "mixed-level normalization");
    std::vector<int> identity(gross.domain_count());
    for (int d = 0; d < gross.domain_count(); ++d) identity[d] = d;
    return normalize_with_factors(gross, propensity, identity);
}

FlowMatrix normalize_edges(const FlowMatrix& gross, const CitingPropensity& propensity,
                           const Nomenclature& nomenclature) {
    if (propensity.level == gross.level()) return normalize_edges(gross, propensity);
    if (!coarser_or_equal(propensity.level, gross.level()))
        throw LevelOrderError(
            "propensity level must be coarser than or equal to the matrix level");
    std::vector<int> mapping(gross.domain_count());
    for (int d = 0; d < gross.domain_count(); ++d) {
        int index = nomenclature.index_of(gross.domain_ids()[d], gross.level());
        if (index < 0)
            throw UnknownDomainError("matrix domain '" + gross.domain_ids()[d] +
                                     "' not in the nomenclature");
        int ancestor = gross.level() == Level::specialty
                           ? nomenclature.ancestor_of_specialty(index, propensity.level)
                           : nomenclature.parent(gross.level(), index);
        mapping[d] = ancestor;
    }
    return normalize_with_factors(gross, propensity, mapping);
}

void write_propensity_tsv(const CitingPropensity& propensity, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << "domain\tw\tw_science\n";
    for (std::size_t d = 0; d < propensity.domain_ids.size(); ++d)
        out << propensity.domain_ids[d] << '\t' << detail::format_double(propensity.w[d]) << '\t'
            << detail::format_double(propensity.w_science) << '\n';
}

}  // namespace citeflow

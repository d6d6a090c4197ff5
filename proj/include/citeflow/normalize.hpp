#pragma once

#include <string>
#include <vector>

#include "citeflow/flows.hpp"

namespace citeflow {

// Average active references per citing article, per domain, on the gross
// matrix. This is the "propensity to cite"; annualization cancels in the
// ratio because flow and volume share the citing period.
struct CitingPropensity {
    Level level = Level::specialty;
    std::vector<std::string> domain_ids;
    std::vector<double> w;     // references per citing article
    double w_science = 0.0;    // science-level average
};

CitingPropensity compute_propensity(const FlowMatrix& gross);

// Citing-side re-weighting: every row (citing domain) is scaled by
// w_science / w(domain), which gives more weight to citations from domains
// that cite sparsely. After this the relative propensity of every domain is
// exactly 1 and the total flow is conserved.
FlowMatrix normalize_edges(const FlowMatrix& gross, const CitingPropensity& propensity);

// Mixed-level variant: the propensity may live at a coarser level than the
// matrix; each row is scaled by the factor of its ancestor domain. Requires
// propensity.level to be coarser than or equal to gross.level.
FlowMatrix normalize_edges(const FlowMatrix& gross, const CitingPropensity& propensity,
                           const Nomenclature& nomenclature);

void write_propensity_tsv(const CitingPropensity& propensity, const std::string& path);

}  // namespace citeflow

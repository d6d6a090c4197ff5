#include "citeflow/aggregate.hpp"

#include <cmath>
#include <sstream>

#include "citeflow/detail/text.hpp"

namespace citeflow {

FlowMatrix roll_up(const FlowMatrix& fm, const Nomenclature& nomenclature, Level target) {
    if (target == fm.level()) return fm;
    if (!coarser_or_equal(target, fm.level()))
        throw LevelOrderError(std::string("cannot roll ") + level_name(fm.level()) + " down to " +
                              level_name(target));

    const int n = fm.domain_count();
    std::vector<int> mapping(n);
    for (int d = 0; d < n; ++d) {
        int index = nomenclature.index_of(fm.domain_ids()[d], fm.level());
        if (index < 0)
            throw UnknownDomainError("matrix domain '" + fm.domain_ids()[d] +
                                     "' not in the nomenclature");
        mapping[d] = fm.level() == Level::specialty
                         ? nomenclature.ancestor_of_specialty(index, target)
                         : nomenclature.parent(fm.level(), index);
    }

    FlowMatrix out(target, fm.period(), fm.kind(), nomenclature.ids(target));
    if (fm.normalization_level()) out.set_normalization_level(*fm.normalization_level());
    fm.for_each([&](int i, int j, double v) { out.add(mapping[i], mapping[j], v); });

    std::vector<double> citable(nomenclature.count(target), 0.0),
        citing(nomenclature.count(target), 0.0);
    for (int d = 0; d < n; ++d) {
        citable[mapping[d]] += fm.citable_volume(d);
        citing[mapping[d]] += fm.citing_volume(d);
    }
    out.set_volumes(std::move(citable), std::move(citing));
    out.set_edge_counts(fm.active_edges(), fm.inactive_edges());
    return out;
}

namespace {

double max_entry_residual(const FlowMatrix& a, const FlowMatrix& b) {
    double max_res = 0.0;
    for (int i = 0; i < a.domain_count(); ++i)
        for (int j = 0; j < a.domain_count(); ++j) {
            double x = a.at(i, j), y = b.at(i, j);
            double denom = std::max({std::abs(x), std::abs(y), 1.0});
            max_res = std::max(max_res, std::abs(x - y) / denom);
        }
    return max_res;
}

}  // namespace

StabilityReport check_aggregation_stability(const Corpus& corpus, const PeriodSpec& period) {
    StabilityReport report;
    const Nomenclature& nom = corpus.nomenclature();
    const double citing_years = period.citing_years();
    double best_witness_gap = 0.0;

    std::array<FlowMatrix, kLevelCount> built;
    for (Level level : kAllLevels)
        built[static_cast<int>(level)] = build_flow_matrix(corpus, level, period);

    for (int li = 0; li + 1 < kLevelCount; ++li) {
        Level child_level = static_cast<Level>(li);
        Level parent_level = static_cast<Level>(li + 1);
        const FlowMatrix& child = built[li];
        const FlowMatrix& parent = built[li + 1];
        FlowMatrix rolled = roll_up(child, nom, parent_level);

        StabilityReport::LevelStep step;
        step.from = child_level;
        step.to = parent_level;
        step.max_commute_residual = max_entry_residual(rolled, parent);

        // Parent indicators recomputed from summed child flows and volumes:
        // exact flow algebra makes impact, growth and propensity stable under
        // aggregation. Balance has no such law; scan for a witness.
        for (int p = 0; p < parent.domain_count(); ++p) {
            double sum_in = 0.0, sum_out = 0.0, sum_citable = 0.0, sum_citing = 0.0;
            double child_balance_wsum = 0.0, child_balance_sum = 0.0, witness_weight = 0.0;
            int children = 0;
            bool balances_defined = true;
            for (int c = 0; c < child.domain_count(); ++c) {
                int ancestor = child_level == Level::specialty
                                   ? nom.ancestor_of_specialty(c, parent_level)
                                   : nom.parent(child_level, c);
                if (ancestor != p) continue;
                ++children;
                double in = child.in_flow(c), out = child.out_flow(c);
                sum_in += in;
                sum_out += out;
                sum_citable += child.citable_volume(c);
                sum_citing += child.citing_volume(c);
                if (out > 0.0) {
                    child_balance_wsum += child.citable_volume(c) * (in / out);
                    child_balance_sum += in / out;
                    witness_weight += child.citable_volume(c);
                } else {
                    balances_defined = false;
                }
            }
            if (children == 0) continue;
            double p_in = parent.in_flow(p), p_out = parent.out_flow(p);
            double p_citable = parent.citable_volume(p), p_citing = parent.citing_volume(p);
            auto residual = [](double a, double b) {
                double denom = std::max({std::abs(a), std::abs(b), 1e-300});
                return std::abs(a - b) / denom;
            };
            if (p_citable > 0.0 && sum_citable > 0.0) {
                step.max_impact_residual =
                    std::max(step.max_impact_residual,
                             residual((p_in / citing_years) / p_citable,
                                      (sum_in / citing_years) / sum_citable));
                step.max_growth_residual =
                    std::max(step.max_growth_residual,
                             residual(p_citing / p_citable, sum_citing / sum_citable));
            }
            if (p_citing > 0.0 && sum_citing > 0.0) {
                step.max_kappa_residual = std::max(
                    step.max_kappa_residual,
                    residual(p_out / (p_citing * citing_years), sum_out / (sum_citing * citing_years)));
            }
            if (children >= 2 && balances_defined && p_out > 0.0 && witness_weight > 0.0) {
                double parent_balance = p_in / p_out;
                double weighted_mean = child_balance_wsum / witness_weight;
                double gap = std::abs(parent_balance - weighted_mean);
                if (gap > best_witness_gap) {
                    best_witness_gap = gap;
                    report.witness = StabilityReport::BalanceWitness{
                        parent_level, parent.domain_ids()[p], parent_balance, weighted_mean,
                        child_balance_sum / children};
                }
            }
        }
        report.steps.push_back(step);
    }
    return report;
}

std::string StabilityReport::to_string() const {
    std::ostringstream out;
    out << "aggregation stability report\n";
    for (const LevelStep& step : steps) {
        out << "  " << level_name(step.from) << " -> " << level_name(step.to) << ":\n"
            << "    roll-up vs direct build residual: "
            << detail::format_double(step.max_commute_residual) << "\n"
            << "    impact stability residual:        "
            << detail::format_double(step.max_impact_residual) << "\n"
            << "    growth stability residual:        "
            << detail::format_double(step.max_growth_residual) << "\n"
            << "    propensity stability residual:    "
            << detail::format_double(step.max_kappa_residual) << "\n";
    }
    if (witness) {
        out << "  balance non-additivity witness: " << witness->parent_id << " ("
            << level_name(witness->level) << ") parent B=" << detail::format_double(witness->parent_balance)
            << " vs volume-weighted child mean " << detail::format_double(witness->children_weighted_mean)
            << " (arithmetic " << detail::format_double(witness->children_arithmetic_mean) << ")\n";
    } else {
        out << "  balance non-additivity witness: none found (uniform exchange)\n";
    }
    return std::move(out).str();
}

nlohmann::json StabilityReport::to_json() const {
    nlohmann::json steps_json = nlohmann::json::array();
    for (const LevelStep& step : steps)
        steps_json.push_back({{"from", level_name(step.from)},
                              {"to", level_name(step.to)},
                              {"max_commute_residual", step.max_commute_residual},
                              {"max_impact_residual", step.max_impact_residual},
                              {"max_growth_residual", step.max_growth_residual},
                              {"max_kappa_residual", step.max_kappa_residual}});
    nlohmann::json doc{{"steps", std::move(steps_json)}};
    if (witness)
        doc["balance_witness"] = {{"level", level_name(witness->level)},
                                  {"parent", witness->parent_id},
                                  {"parent_balance", witness->parent_balance},
                                  {"children_weighted_mean", witness->children_weighted_mean},
                                  {"children_arithmetic_mean", witness->children_arithmetic_mean}};
    return doc;
}

}  // namespace citeflow

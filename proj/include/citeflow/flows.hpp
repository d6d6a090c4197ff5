#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "citeflow/corpus.hpp"

namespace citeflow {

enum class MatrixKind { gross, normalized };

struct FlowBuildOptions {
    bool include_diagonal = true;  // keep domain self-flows (A -> A)
    bool unit_weights = false;     // count every edge as weight 1 regardless of stored weight
};

// Domain x domain citation flow for one period pair at one level.
// flows[citing][cited] holds raw (un-annualized) edge-weight sums, so the
// matrix total equals the active edge weight. Volumes are annualized.
class FlowMatrix {
public:
    FlowMatrix() = default;
    FlowMatrix(Level level, PeriodSpec period, MatrixKind kind, std::vector<std::string> domain_ids);

    Level level() const { return level_; }
    const PeriodSpec& period() const { return period_; }
    MatrixKind kind() const { return kind_; }
    // Level the citing-side propensity was computed at; set only when
    // kind == normalized.
    std::optional<Level> normalization_level() const { return normalization_level_; }
    void set_normalization_level(Level level) { normalization_level_ = level; }

    int domain_count() const { return n_; }
    const std::vector<std::string>& domain_ids() const { return domain_ids_; }
    bool dense() const { return dense_storage_; }

    double at(int citing, int cited) const;
    void add(int citing, int cited, double weight);
    void scale_row(int citing, double factor);

    double in_flow(int domain) const;    // column sum: citations received
    double out_flow(int domain) const;   // row sum: references emitted
    double total_flow() const;

    double citable_volume(int domain) const { return citable_volume_[domain]; }
    double citing_volume(int domain) const { return citing_volume_[domain]; }
    double citable_volume_total() const;
    double citing_volume_total() const;
    void set_volumes(std::vector<double> citable, std::vector<double> citing);

    std::uint64_t active_edges() const { return active_edges_; }
    std::uint64_t inactive_edges() const { return inactive_edges_; }
    void set_edge_counts(std::uint64_t active, std::uint64_t inactive);

    // Visits non-zero entries as (citing, cited, weight), row-major for dense
    // storage, unspecified order for sparse.
    template <typename Fn>
    void for_each(Fn&& fn) const {
        if (dense_storage_) {
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) {
                    double v = dense_[static_cast<std::size_t>(i) * n_ + j];
                    if (v != 0.0) fn(i, j, v);
                }
        } else {
            for (const auto& [key, v] : sparse_) {
                if (v != 0.0) fn(static_cast<int>(key / n_), static_cast<int>(key % n_), v);
            }
        }
    }

private:
    Level level_ = Level::specialty;
    PeriodSpec period_;
    MatrixKind kind_ = MatrixKind::gross;
    std::optional<Level> normalization_level_;
    std::vector<std::string> domain_ids_;
    int n_ = 0;
    bool dense_storage_ = true;
    std::vector<double> dense_;  // n*n row-major when dense
    std::unordered_map<std::uint64_t, double> sparse_;
    std::vector<double> citable_volume_;  // annualized |A^cited|
    std::vector<double> citing_volume_;   // annualized |A^citing|
    std::uint64_t active_edges_ = 0;
    std::uint64_t inactive_edges_ = 0;
};

// Aggregates edges inside the period window into a gross flow matrix with
// fractional counting at `level`. Throws EmptyWindowError when no edge is
// active.
FlowMatrix build_flow_matrix(const Corpus& corpus, Level level, const PeriodSpec& period,
                             const FlowBuildOptions& options = {});

// By-id accessors; throw UnknownDomainError.
double in_flow(const FlowMatrix& fm, const std::string& domain_id);
double out_flow(const FlowMatrix& fm, const std::string& domain_id);

struct ScienceTotals {
    double total_flow = 0.0;
    double citable_volume = 0.0;  // annualized |S^cited|
    double citing_volume = 0.0;   // annualized |S^citing|
};

ScienceTotals science_totals(const FlowMatrix& fm);

void write_flow_tsv(const FlowMatrix& fm, const std::string& path);
void write_flow_sidecar(const FlowMatrix& fm, const std::string& path);

}  // namespace citeflow

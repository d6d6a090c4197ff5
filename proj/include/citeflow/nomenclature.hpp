#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "citeflow/errors.hpp"

namespace citeflow {

// Levels are ordered finest to coarsest. Aggregating "up" means moving to a
// larger enum value; the implicit root above `discipline` is all of science.
enum class Level : int {
    specialty = 0,
    sub_discipline = 1,
    discipline = 2,
};

inline constexpr int kLevelCount = 3;

inline constexpr std::array<Level, kLevelCount> kAllLevels = {
    Level::specialty, Level::sub_discipline, Level::discipline};

const char* level_name(Level level);
std::optional<Level> parse_level(std::string_view name);

// True when `a` is at least as coarse as `b`.
inline bool coarser_or_equal(Level a, Level b) {
    return static_cast<int>(a) >= static_cast<int>(b);
}

// Embedded three-level classification: every specialty has exactly one
// sub-discipline parent and every sub-discipline exactly one discipline
// parent. All leaves sit at the specialty level.
class Nomenclature {
public:
    class Builder {
    public:
        Builder& discipline(std::string id, std::string label = "");
        Builder& sub_discipline(std::string id, std::string label, const std::string& discipline_id);
        Builder& specialty(std::string id, std::string label, const std::string& sub_discipline_id);
        // Validates the embedding invariants; throws HierarchyError.
        Nomenclature build();

    private:
        struct Node {
            std::string id, label, parent_id;
        };
        std::array<std::vector<Node>, kLevelCount> nodes_;
    };

    Nomenclature() = default;

    static Nomenclature from_json(const nlohmann::json& doc);
    static Nomenclature from_json_file(const std::string& path);
    nlohmann::json to_json() const;

    int count(Level level) const { return static_cast<int>(at(level).ids.size()); }
    const std::vector<std::string>& ids(Level level) const { return at(level).ids; }
    const std::string& id(Level level, int index) const { return at(level).ids[index]; }
    const std::string& label(Level level, int index) const { return at(level).labels[index]; }

    // Index of the parent one level up; -1 at the discipline level.
    int parent(Level level, int index) const;

    // Ancestor of a specialty at `target`; the specialty itself when
    // target == specialty.
    int ancestor_of_specialty(int specialty_index, Level target) const;

    // Lookup by id across all levels.
    std::optional<std::pair<Level, int>> find(const std::string& domain_id) const;
    // Index at one level; -1 when the id is absent or lives at another level.
    int index_of(const std::string& domain_id, Level level) const;

    // Copy with flagged specialties removed. Sub-disciplines and disciplines
    // left without children are pruned so leaves stay at the specialty level.
    Nomenclature drop_specialties(const std::vector<bool>& drop) const;

    bool operator==(const Nomenclature& other) const;

private:
    struct LevelData {
        std::vector<std::string> ids;
        std::vector<std::string> labels;
        std::vector<int> parent;  // index one level up; empty at discipline level
    };

    const LevelData& at(Level level) const { return levels_[static_cast<int>(level)]; }
    LevelData& at(Level level) { return levels_[static_cast<int>(level)]; }

    std::array<LevelData, kLevelCount> levels_;
    std::unordered_map<std::string, std::pair<Level, int>> by_id_;

    friend class Builder;
};

Nomenclature load_nomenclature(const std::string& path);

}  // namespace citeflow

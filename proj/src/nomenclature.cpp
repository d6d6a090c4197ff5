#include "citeflow/nomenclature.hpp"

#include <fstream>

#include "citeflow/detail/text.hpp"

namespace citeflow {

const char* level_name(Level level) {
    switch (level) {
        case Level::specialty: return "specialty";
        case Level::sub_discipline: return "sub-discipline";
        case Level::discipline: return "discipline";
    }
    return "?";
}

std::optional<Level> parse_level(std::string_view name) {
    if (name == "specialty") return Level::specialty;
    if (name == "sub-discipline" || name == "sub_discipline") return Level::sub_discipline;
    if (name == "discipline") return Level::discipline;
    return std::nullopt;
}

Nomenclature::Builder& Nomenclature::Builder::discipline(std::string id, std::string label) {
    nodes_[static_cast<int>(Level::discipline)].push_back({std::move(id), std::move(label), ""});
    return *this;
}

Nomenclature::Builder& Nomenclature::Builder::sub_discipline(std::string id, std::string label,
                                                             const std::string& discipline_id) {
    nodes_[static_cast<int>(Level::sub_discipline)].push_back(
        {std::move(id), std::move(label), discipline_id});
    return *this;
}

Nomenclature::Builder& Nomenclature::Builder::specialty(std::string id, std::string label,
                                                        const std::string& sub_discipline_id) {
    nodes_[static_cast<int>(Level::specialty)].push_back(
        {std::move(id), std::move(label), sub_discipline_id});
    return *this;
}

Nomenclature Nomenclature::Builder::build() {
    Nomenclature nom;
    // Coarsest first so parents exist when children arrive.
    for (int li = kLevelCount - 1; li >= 0; --li) {
        Level level = static_cast<Level>(li);
        auto& data = nom.at(level);
        for (const auto& node : nodes_[li]) {
            if (node.id.empty()) throw HierarchyError("domain with empty id");
            if (nom.by_id_.count(node.id))
                throw HierarchyError("duplicate domain id '" + node.id +
                                     "' (each domain must have exactly one parent)");
            if (level != Level::discipline) {
                Level parent_level = static_cast<Level>(li + 1);
                int parent_index = nom.index_of(node.parent_id, parent_level);
                if (parent_index < 0)
                    throw HierarchyError("domain '" + node.id + "' references unknown " +
                                         level_name(parent_level) + " '" + node.parent_id + "'");
                data.parent.push_back(parent_index);
            }
            nom.by_id_.emplace(node.id, std::make_pair(level, static_cast<int>(data.ids.size())));
            data.ids.push_back(node.id);
            data.labels.push_back(node.label);
        }
    }
    // Leaves must sit at the specialty level: no childless inner node.
    std::vector<bool> sub_has_child(nom.count(Level::sub_discipline), false);
    for (int p : nom.at(Level::specialty).parent) sub_has_child[p] = true;
    for (int i = 0; i < nom.count(Level::sub_discipline); ++i)
        if (!sub_has_child[i])
            throw HierarchyError("sub-discipline '" + nom.id(Level::sub_discipline, i) +
                                 "' has no specialties");
    std::vector<bool> disc_has_child(nom.count(Level::discipline), false);
    for (int p : nom.at(Level::sub_discipline).parent) disc_has_child[p] = true;
    for (int i = 0; i < nom.count(Level::discipline); ++i)
        if (!disc_has_child[i])
            throw HierarchyError("discipline '" + nom.id(Level::discipline, i) +
                                 "' has no sub-disciplines");
    return nom;
}

Nomenclature Nomenclature::from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("disciplines") || !doc["disciplines"].is_array())
        throw ParseError("nomenclature: expected object with a 'disciplines' array");
    Builder builder;
    for (const auto& disc : doc["disciplines"]) {
        if (!disc.contains("id")) throw ParseError("nomenclature: discipline without id");
        std::string disc_id = disc["id"].get<std::string>();
        builder.discipline(disc_id, disc.value("label", ""));
        for (const auto& sub : disc.value("sub_disciplines", nlohmann::json::array())) {
            if (!sub.contains("id")) throw ParseError("nomenclature: sub-discipline without id");
            std::string sub_id = sub["id"].get<std::string>();
            builder.sub_discipline(sub_id, sub.value("label", ""), disc_id);
            for (const auto& spec : sub.value("specialties", nlohmann::json::array())) {
                if (!spec.contains("id")) throw ParseError("nomenclature: specialty without id");
                builder.specialty(spec["id"].get<std::string>(), spec.value("label", ""), sub_id);
            }
        }
    }
    return builder.build();
}

Nomenclature Nomenclature::from_json_file(const std::string& path) {
    std::string content = detail::read_file(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(content, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("nomenclature '" + path + "': " + e.what());
    }
    return from_json(doc);
}

nlohmann::json Nomenclature::to_json() const {
    nlohmann::json disciplines = nlohmann::json::array();
    for (int d = 0; d < count(Level::discipline); ++d) {
        nlohmann::json subs = nlohmann::json::array();
        for (int s = 0; s < count(Level::sub_discipline); ++s) {
            if (parent(Level::sub_discipline, s) != d) continue;
            nlohmann::json specs = nlohmann::json::array();
            for (int sp = 0; sp < count(Level::specialty); ++sp) {
                if (parent(Level::specialty, sp) != s) continue;
                specs.push_back({{"id", id(Level::specialty, sp)},
                                 {"label", label(Level::specialty, sp)}});
            }
            subs.push_back({{"id", id(Level::sub_discipline, s)},
                            {"label", label(Level::sub_discipline, s)},
                            {"specialties", std::move(specs)}});
        }
        disciplines.push_back({{"id", id(Level::discipline, d)},
                               {"label", label(Level::discipline, d)},
                               {"sub_disciplines", std::move(subs)}});
    }
    return {{"disciplines", std::move(disciplines)}};
}

int Nomenclature::parent(Level level, int index) const {
    if (level == Level::discipline) return -1;
    return at(level).parent[index];
}

int Nomenclature::ancestor_of_specialty(int specialty_index, Level target) const {
    int idx = specialty_index;
    for (int li = 0; li < static_cast<int>(target); ++li)
        idx = levels_[li].parent[idx];
    return idx;
}

std::optional<std::pair<Level, int>> Nomenclature::find(const std::string& domain_id) const {
    auto it = by_id_.find(domain_id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

int Nomenclature::index_of(const std::string& domain_id, Level level) const {
    auto hit = find(domain_id);
    if (!hit || hit->first != level) return -1;
    return hit->second;
}

Nomenclature Nomenclature::drop_specialties(const std::vector<bool>& drop) const {
    Builder builder;
    std::vector<bool> sub_keep(count(Level::sub_discipline), false);
    for (int sp = 0; sp < count(Level::specialty); ++sp)
        if (!drop[sp]) sub_keep[parent(Level::specialty, sp)] = true;
    std::vector<bool> disc_keep(count(Level::discipline), false);
    for (int s = 0; s < count(Level::sub_discipline); ++s)
        if (sub_keep[s]) disc_keep[parent(Level::sub_discipline, s)] = true;

    for (int d = 0; d < count(Level::discipline); ++d)
        if (disc_keep[d]) builder.discipline(id(Level::discipline, d), label(Level::discipline, d));
    for (int s = 0; s < count(Level::sub_discipline); ++s)
        if (sub_keep[s])
            builder.sub_discipline(id(Level::sub_discipline, s), label(Level::sub_discipline, s),
                                   id(Level::discipline, parent(Level::sub_discipline, s)));
    for (int sp = 0; sp < count(Level::specialty); ++sp)
        if (!drop[sp])
            builder.specialty(id(Level::specialty, sp), label(Level::specialty, sp),
                              id(Level::sub_discipline, parent(Level::specialty, sp)));
    return builder.build();
}

bool Nomenclature::operator==(const Nomenclature& other) const {
    for (int li = 0; li < kLevelCount; ++li) {
        if (levels_[li].ids != other.levels_[li].ids) return false;
        if (levels_[li].labels != other.levels_[li].labels) return false;
        if (levels_[li].parent != other.levels_[li].parent) return false;
    }
    return true;
}

Nomenclature load_nomenclature(const std::string& path) {
    return Nomenclature::from_json_file(path);
}

}  // namespace citeflow

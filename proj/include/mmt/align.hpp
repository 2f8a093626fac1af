#ifndef MMT_ALIGN_HPP
#define MMT_ALIGN_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmt/corpus.hpp"
#include "mmt/csv.hpp"
#include "mmt/errors.hpp"
#include "mmt/timeutil.hpp"
#include "mmt/topic_model.hpp"

namespace mmt {

/// Per-message topic assignments for one fitted model.
struct AssignmentTable {
    Modality modality = Modality::text;
    std::map<std::string, int> assignment;  // message_id -> topic (-1 outlier)

    static AssignmentTable from_result(const TopicModelResult& r) {
        return AssignmentTable{r.modality, r.assignments};
    }

    std::set<int> topic_ids() const {
        std::set<int> out;
        for (const auto& [id, t] : assignment)
            if (t >= 0) out.insert(t);
        return out;
    }
};

struct BestTarget {
    std::optional<int> topic;
    std::size_t intersection = 0;
};

/// Over the message ids shared by A and B, the non-outlier topic of B with
/// the largest document intersection with source topic s; ties go to the
/// smaller topic id, no overlap at all gives nullopt.
inline BestTarget best_target(int s, const AssignmentTable& A, const AssignmentTable& B) {
    if (s < 0) throw DataError("best_target: source topic must not be the outlier label");
    std::map<int, std::size_t> counts;
    bool seen_source = false;
    for (const auto& [id, topic] : A.assignment) {
        if (topic != s) continue;
        seen_source = true;
        auto it = B.assignment.find(id);
        if (it == B.assignment.end() || it->second < 0) continue;
        ++counts[it->second];
    }
    if (!seen_source) throw DataError("best_target: unknown source topic " + std::to_string(s));
    BestTarget best;
    for (const auto& [topic, n] : counts) {  // ascending topic id => ties keep the smaller
        if (n > best.intersection) {
            best.topic = topic;
            best.intersection = n;
        }
    }
    return best;
}

/// Fraction of A's non-outlier topics whose best target in B maps straight
/// back to them. Topics without any target count as asymmetric.
inline double symmetry_ratio(const AssignmentTable& A, const AssignmentTable& B) {
    std::set<int> topics = A.topic_ids();
    if (topics.empty()) throw DataError("symmetry_ratio: source table has no non-outlier topics");
    std::size_t symmetric = 0;
    for (int s : topics) {
        BestTarget fwd = best_target(s, A, B);
        if (!fwd.topic) continue;
        BestTarget back = best_target(*fwd.topic, B, A);
        if (back.topic && *back.topic == s) ++symmetric;
    }
    return static_cast<double>(symmetric) / static_cast<double>(topics.size());
}

struct AlignmentReport {
    std::string source_modality;
    std::string target_modality;
    std::map<int, BestTarget> best_targets;
    double symmetry = 0;
    std::size_t computed_over = 0;  // shared message ids
};

inline AlignmentReport align_pair(const AssignmentTable& A, const AssignmentTable& B) {
    AlignmentReport rep;
    rep.source_modality = to_string(A.modality);
    rep.target_modality = to_string(B.modality);
    for (const auto& [id, t] : A.assignment)
        if (B.assignment.count(id)) ++rep.computed_over;
    for (int s : A.topic_ids()) rep.best_targets[s] = best_target(s, A, B);
    rep.symmetry = symmetry_ratio(A, B);
    return rep;
}

inline nlohmann::json to_json(const AlignmentReport& r) {
    nlohmann::json j;
    j["source_modality"] = r.source_modality;
    j["target_modality"] = r.target_modality;
    j["symmetry_ratio"] = r.symmetry;
    j["computed_over"] = r.computed_over;
    nlohmann::json bt = nlohmann::json::object();
    for (const auto& [s, b] : r.best_targets) {
        nlohmann::json e;
        if (b.topic) e["target"] = *b.topic;
        else e["target"] = nullptr;
        e["intersection"] = b.intersection;
        bt[std::to_string(s)] = std::move(e);
    }
    j["best_targets"] = std::move(bt);
    return j;
}

// ---------------------------------------------------------------------------
// Topic groups

/// Human-maintained (modality, topic) -> group map; uncovered topics
/// default to "Misc". CSV columns: modality, topic_id, group.
struct GroupMap {
    std::map<std::pair<std::string, int>, std::string> entries;

    std::string group_of(Modality m, int topic) const {
        auto it = entries.find({to_string(m), topic});
        return it == entries.end() ? "Misc" : it->second;
    }

    static GroupMap from_csv(const std::string& path) {
        GroupMap gm;
        auto rows = csv_read_file(path);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& row = rows[i];
            if (row.size() != 3)
                throw DataError("group map: row " + std::to_string(i + 1) + " needs 3 fields");
            if (i == 0 && row[0] == "modality") continue;  // optional header
            if (!parse_modality(row[0]))
                throw DataError("group map: bad modality '" + row[0] + "'");
            gm.entries[{row[0], std::stoi(row[1])}] = row[2].empty() ? "Misc" : row[2];
        }
        return gm;
    }

    void to_csv(const std::string& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("group map: cannot write " + path);
        out << csv_row({"modality", "topic_id", "group"});
        for (const auto& [key, group] : entries)
            out << csv_row({key.first, std::to_string(key.second), group});
    }
};

using GroupDocSets = std::map<std::string, std::map<std::string, std::set<std::string>>>;

/// Union of member-document ids per (group, modality). Every group-map
/// entry must reference an existing topic of its modality's table.
inline GroupDocSets group_doc_sets(const std::map<std::string, AssignmentTable>& tables,
                                   const GroupMap& gm) {
    for (const auto& [key, group] : gm.entries) {
        auto it = tables.find(key.first);
        if (it == tables.end())
            throw DataError("group map: no fitted model for modality '" + key.first + "'");
        if (!it->second.topic_ids().count(key.second))
            throw DataError("group map: unknown topic " + std::to_string(key.second) +
                            " for modality " + key.first);
    }
    GroupDocSets out;
    for (const auto& [modality, table] : tables) {
        for (const auto& [id, topic] : table.assignment) {
            if (topic < 0) continue;
            auto m = parse_modality(modality);
            std::string group = gm.group_of(*m, topic);
            out[group][modality].insert(id);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Three-way intersections

struct VennRegions {
    std::size_t text_only = 0, image_only = 0, mm_only = 0;
    std::size_t text_image = 0, text_mm = 0, image_mm = 0;
    std::size_t all_three = 0;

    std::size_t sum() const {
        return text_only + image_only + mm_only + text_image + text_mm + image_mm + all_three;
    }
};

struct GroupIntersection {
    std::string group;
    std::map<std::string, std::size_t> set_sizes;       // modality -> |set|
    VennRegions regions;
    // region label -> proportion of each modality's set (only regions the
    // modality participates in).
    std::map<std::string, std::map<std::string, double>> proportions;
};

/// Exclusive region cardinalities for the (text, image, multimodal) sets
/// plus per-modality document proportions.
inline GroupIntersection three_way_intersections(const std::set<std::string>& s_text,
                                                 const std::set<std::string>& s_image,
                                                 const std::set<std::string>& s_mm,
                                                 const std::string& group = "") {
    GroupIntersection gi;
    gi.group = group;
    gi.set_sizes["text"] = s_text.size();
    gi.set_sizes["image"] = s_image.size();
    gi.set_sizes["multimodal"] = s_mm.size();
    std::set<std::string> all;
    all.insert(s_text.begin(), s_text.end());
    all.insert(s_image.begin(), s_image.end());
    all.insert(s_mm.begin(), s_mm.end());
    for (const auto& id : all) {
        bool t = s_text.count(id) > 0, i = s_image.count(id) > 0, m = s_mm.count(id) > 0;
        if (t && i && m) ++gi.regions.all_three;
        else if (t && i) ++gi.regions.text_image;
        else if (t && m) ++gi.regions.text_mm;
        else if (i && m) ++gi.regions.image_mm;
        else if (t) ++gi.regions.text_only;
        else if (i) ++gi.regions.image_only;
        else ++gi.regions.mm_only;
    }
    auto prop = [](std::size_t region, std::size_t total) {
        return total == 0 ? 0.0 : static_cast<double>(region) / static_cast<double>(total);
    };
    gi.proportions["text"] = {{"only", prop(gi.regions.text_only, s_text.size())},
                              {"with_image", prop(gi.regions.text_image, s_text.size())},
                              {"with_multimodal", prop(gi.regions.text_mm, s_text.size())},
                              {"all_three", prop(gi.regions.all_three, s_text.size())}};
    gi.proportions["image"] = {{"only", prop(gi.regions.image_only, s_image.size())},
                               {"with_text", prop(gi.regions.text_image, s_image.size())},
                               {"with_multimodal", prop(gi.regions.image_mm, s_image.size())},
                               {"all_three", prop(gi.regions.all_three, s_image.size())}};
    gi.proportions["multimodal"] = {{"only", prop(gi.regions.mm_only, s_mm.size())},
                                    {"with_text", prop(gi.regions.text_mm, s_mm.size())},
                                    {"with_image", prop(gi.regions.image_mm, s_mm.size())},
                                    {"all_three", prop(gi.regions.all_three, s_mm.size())}};
    return gi;
}

inline nlohmann::json to_json(const GroupIntersection& gi) {
    nlohmann::json j;
    j["group"] = gi.group;
    j["set_sizes"] = gi.set_sizes;
    j["regions"] = {{"text_only", gi.regions.text_only},
                    {"image_only", gi.regions.image_only},
                    {"multimodal_only", gi.regions.mm_only},
                    {"text_image", gi.regions.text_image},
                    {"text_multimodal", gi.regions.text_mm},
                    {"image_multimodal", gi.regions.image_mm},
                    {"all_three", gi.regions.all_three}};
    j["union_size"] = gi.regions.sum();
    j["proportions"] = gi.proportions;
    return j;
}

// ---------------------------------------------------------------------------
// Time series and rankings

struct TimeSeries {
    std::int64_t start_day = 0;  // UTC day index of the corpus period
    std::int64_t end_day = 0;    // inclusive
    // (group, modality) -> counts per day, zero-filled over the period
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> counts;
};

/// Message counts per UTC calendar day for every (group, modality) set.
/// The day range spans the whole corpus period; missing days are zeros.
inline TimeSeries time_series(const GroupDocSets& sets, const Corpus& corpus) {
    std::map<std::string, std::int64_t> day_of;
    TimeSeries ts;
    bool first = true;
    for (const Message& m : corpus.messages) {
        std::int64_t d = utc_day(m.timestamp);
        day_of[m.message_id] = d;
        if (first || d < ts.start_day) ts.start_day = d;
        if (first || d > ts.end_day) ts.end_day = d;
        first = false;
    }
    if (first) throw DataError("time_series: empty corpus");
    std::size_t n_days = static_cast<std::size_t>(ts.end_day - ts.start_day + 1);
    for (const auto& [group, per_modality] : sets) {
        for (const auto& [modality, ids] : per_modality) {
            auto& vec = ts.counts[{group, modality}];
            vec.assign(n_days, 0);
            for (const auto& id : ids) {
                auto it = day_of.find(id);
                if (it == day_of.end())
                    throw DataError("time_series: id " + id + " has no timestamp in the corpus");
                ++vec[static_cast<std::size_t>(it->second - ts.start_day)];
            }
        }
    }
    return ts;
}

inline void time_series_to_csv(const TimeSeries& ts, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("time_series: cannot write " + path);
    out << csv_row({"date", "group", "modality", "count"});
    for (const auto& [key, counts] : ts.counts)
        for (std::size_t d = 0; d < counts.size(); ++d)
            out << csv_row({format_day(ts.start_day + static_cast<std::int64_t>(d)), key.first,
                            key.second, std::to_string(counts[d])});
}

struct GroupRankEntry {
    std::string group;
    std::size_t count = 0;
    double proportion = 0;  // of the modality's non-outlier documents
};

/// Top-k groups per modality by document count, Misc excluded from the
/// ranking (it carries no thematic signal) but included in the
/// denominator.
inline std::map<std::string, std::vector<GroupRankEntry>> group_ranking(const GroupDocSets& sets,
                                                                        std::size_t top_k = 5) {
    std::map<std::string, std::size_t> totals;
    for (const auto& [group, per_modality] : sets)
        for (const auto& [modality, ids] : per_modality) totals[modality] += ids.size();
    std::map<std::string, std::vector<GroupRankEntry>> out;
    for (const auto& [group, per_modality] : sets) {
        if (group == "Misc") continue;
        for (const auto& [modality, ids] : per_modality) {
            GroupRankEntry e;
            e.group = group;
            e.count = ids.size();
            e.proportion = totals[modality] ? static_cast<double>(ids.size()) /
                                                  static_cast<double>(totals[modality])
                                            : 0.0;
            out[modality].push_back(std::move(e));
        }
    }
    for (auto& [modality, entries] : out) {
        std::sort(entries.begin(), entries.end(), [](const GroupRankEntry& a, const GroupRankEntry& b) {
            if (a.count != b.count) return a.count > b.count;
            return a.group < b.group;
        });
        if (entries.size() > top_k) entries.resize(top_k);
    }
    return out;
}

}  // namespace mmt

#endif

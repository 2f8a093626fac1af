#ifndef MMT_CORPUS_HPP
#define MMT_CORPUS_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "mmt/errors.hpp"
#include "mmt/hashutil.hpp"
#include "mmt/text.hpp"
#include "mmt/timeutil.hpp"

namespace mmt {

inline std::string hex_dhash(std::uint64_t h) { return hex64(h); }
inline bool parse_hex_dhash(const std::string& s, std::uint64_t& out) { return parse_hex64(s, out); }

enum class ChannelCategory {
    conspiracy_ideology,
    qanon,
    esotericism,
    querdenken,
    covid19_disinfo,
    reichsbuerger,
    other,
};

inline const char* to_string(ChannelCategory c) {
    switch (c) {
        case ChannelCategory::conspiracy_ideology: return "conspiracy_ideology";
        case ChannelCategory::qanon: return "qanon";
        case ChannelCategory::esotericism: return "esotericism";
        case ChannelCategory::querdenken: return "querdenken";
        case ChannelCategory::covid19_disinfo: return "covid19_disinfo";
        case ChannelCategory::reichsbuerger: return "reichsbuerger";
        case ChannelCategory::other: return "other";
    }
    return "other";
}

inline std::optional<ChannelCategory> parse_channel_category(std::string_view s) {
    if (s == "conspiracy_ideology") return ChannelCategory::conspiracy_ideology;
    if (s == "qanon") return ChannelCategory::qanon;
    if (s == "esotericism") return ChannelCategory::esotericism;
    if (s == "querdenken") return ChannelCategory::querdenken;
    if (s == "covid19_disinfo") return ChannelCategory::covid19_disinfo;
    if (s == "reichsbuerger") return ChannelCategory::reichsbuerger;
    if (s == "other") return ChannelCategory::other;
    return std::nullopt;
}

enum class CorpusStage { raw, paired, base_dedup, text_dedup, image_dedup, multimodal_dedup };

inline const char* to_string(CorpusStage s) {
    switch (s) {
        case CorpusStage::raw: return "raw";
        case CorpusStage::paired: return "paired";
        case CorpusStage::base_dedup: return "base_dedup";
        case CorpusStage::text_dedup: return "text_dedup";
        case CorpusStage::image_dedup: return "image_dedup";
        case CorpusStage::multimodal_dedup: return "multimodal_dedup";
    }
    return "raw";
}

inline std::optional<CorpusStage> parse_corpus_stage(std::string_view s) {
    if (s == "raw") return CorpusStage::raw;
    if (s == "paired") return CorpusStage::paired;
    if (s == "base_dedup") return CorpusStage::base_dedup;
    if (s == "text_dedup") return CorpusStage::text_dedup;
    if (s == "image_dedup") return CorpusStage::image_dedup;
    if (s == "multimodal_dedup") return CorpusStage::multimodal_dedup;
    return std::nullopt;
}

struct Message {
    std::string message_id;
    std::string channel_id;
    ChannelCategory channel_category = ChannelCategory::other;
    std::int64_t timestamp = 0;  // UTC epoch seconds
    std::string raw_text;
    std::string clean_text;
    std::optional<std::string> image_ref;
    bool is_service = false;
    // Filled by the dedup stage; 64-bit dhash of the referenced image.
    std::optional<std::uint64_t> image_hash;
};

struct Corpus {
    std::vector<Message> messages;
    std::string period_label;
    CorpusStage stage = CorpusStage::raw;

    std::size_t size() const { return messages.size(); }
};

/// Removes http(s):// and t.me URLs, drops @mention tokens, strips the
/// leading '#' off hashtags, collapses whitespace. Total and idempotent.
inline std::string clean_text(std::string_view raw) {
    std::vector<std::string> kept;
    for (std::string token : split_ws(raw)) {
        // Hashtags keep the word: "#Breaking" -> "Breaking".
        std::size_t h = 0;
        while (h < token.size() && token[h] == '#') ++h;
        if (h) token.erase(0, h);
        // URLs: cut from the scheme onward; t.me links only count when the
        // token starts with them.
        for (std::size_t pos = 0; pos + 7 <= token.size(); ++pos) {
            if (starts_with_ci(std::string_view(token).substr(pos), "http://") ||
                starts_with_ci(std::string_view(token).substr(pos), "https://")) {
                token.erase(pos);
                break;
            }
        }
        if (starts_with_ci(token, "t.me/") || starts_with_ci(token, "www.t.me/")) continue;
        if (token.empty() || token[0] == '@') continue;
        kept.push_back(std::move(token));
    }
    return join(kept, " ");
}

struct LoadStats {
    std::size_t total_lines = 0;
    std::size_t malformed_lines = 0;
};

/// Loads a JSONL corpus: one message object per line, UTF-8. Schema:
///   {"message_id": str, "channel_id": str, "channel_category": str,
///    "timestamp": ISO-8601 str, "text": str, "image_path": str|null,
///    "is_service": bool}
/// Unknown extra keys are ignored ("dhash" is picked up when present, so
/// dedup output round-trips). Malformed lines are counted, not fatal,
/// unless they exceed max_malformed_fraction of all lines.
inline Corpus load_messages(const std::string& path, LoadStats* stats_out = nullptr,
                            double max_malformed_fraction = 0.5) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("load_messages: cannot open " + path);
    Corpus corpus;
    corpus.stage = CorpusStage::raw;
    LoadStats stats;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        ++stats.total_lines;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            ++stats.malformed_lines;
            continue;
        }
        Message m;
        try {
            m.message_id = j.at("message_id").get<std::string>();
            m.channel_id = j.at("channel_id").get<std::string>();
            auto cat = parse_channel_category(j.at("channel_category").get<std::string>());
            if (!cat) throw DataError("unknown channel_category");
            m.channel_category = *cat;
            if (!parse_iso8601(j.at("timestamp").get<std::string>(), m.timestamp))
                throw DataError("bad timestamp");
            m.raw_text = j.at("text").get<std::string>();
            if (j.contains("image_path") && !j["image_path"].is_null())
                m.image_ref = j["image_path"].get<std::string>();
            m.is_service = j.at("is_service").get<bool>();
            if (j.contains("dhash") && j["dhash"].is_string()) {
                std::uint64_t h;
                if (parse_hex_dhash(j["dhash"].get<std::string>(), h)) m.image_hash = h;
            }
        } catch (const std::exception&) {
            ++stats.malformed_lines;
            continue;
        }
        if (!seen_ids.insert(m.message_id).second) {
            // message_id must be unique within a corpus; treat repeats as
            // malformed input rather than silently overwriting.
            ++stats.malformed_lines;
            continue;
        }
        m.clean_text = clean_text(m.raw_text);
        corpus.messages.push_back(std::move(m));
    }
    if (stats.total_lines > 0 &&
        static_cast<double>(stats.malformed_lines) > max_malformed_fraction * static_cast<double>(stats.total_lines))
        throw DataError("load_messages: " + std::to_string(stats.malformed_lines) + " of " +
                        std::to_string(stats.total_lines) + " lines malformed in " + path);
    if (stats_out) *stats_out = stats;
    return corpus;
}

/// Messages that survive pairing: non-service, non-empty clean text, image
/// present. Relative order preserved.
inline Corpus filter_paired(const Corpus& c) {
    if (c.stage != CorpusStage::raw)
        throw DataError("filter_paired: expected raw corpus, got " + std::string(to_string(c.stage)));
    Corpus out;
    out.period_label = c.period_label;
    out.stage = CorpusStage::paired;
    for (const Message& m : c.messages) {
        if (m.is_service) continue;
        if (m.clean_text.empty()) continue;
        if (!m.image_ref) continue;
        out.messages.push_back(m);
    }
    return out;
}

struct CategoryStats {
    std::size_t message_count = 0;
    std::size_t channel_count = 0;
};

inline std::map<ChannelCategory, CategoryStats> category_stats(const Corpus& c) {
    std::map<ChannelCategory, std::unordered_set<std::string>> channels;
    std::map<ChannelCategory, std::size_t> counts;
    for (const Message& m : c.messages) {
        ++counts[m.channel_category];
        channels[m.channel_category].insert(m.channel_id);
    }
    std::map<ChannelCategory, CategoryStats> out;
    for (auto& [cat, n] : counts) out[cat] = CategoryStats{n, channels[cat].size()};
    return out;
}

inline nlohmann::json message_to_json(const Message& m) {
    nlohmann::json j;
    j["message_id"] = m.message_id;
    j["channel_id"] = m.channel_id;
    j["channel_category"] = to_string(m.channel_category);
    j["timestamp"] = format_iso8601(m.timestamp);
    j["text"] = m.raw_text;
    if (m.image_ref) j["image_path"] = *m.image_ref;
    else j["image_path"] = nullptr;
    j["is_service"] = m.is_service;
    if (m.image_hash) j["dhash"] = hex_dhash(*m.image_hash);
    return j;
}

inline void write_messages(const Corpus& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("write_messages: cannot open " + path + " for writing");
    for (const Message& m : c.messages) out << message_to_json(m).dump() << "\n";
    if (!out) throw DataError("write_messages: write failed for " + path);
}

}  // namespace mmt

#endif

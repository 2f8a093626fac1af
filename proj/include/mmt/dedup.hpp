#ifndef MMT_DEDUP_HPP
#define MMT_DEDUP_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmt/corpus.hpp"
#include "mmt/dhash.hpp"
#include "mmt/errors.hpp"

namespace mmt {

enum class DedupModality { text, image, multimodal };

inline const char* to_string(DedupModality m) {
    switch (m) {
        case DedupModality::text: return "text";
        case DedupModality::image: return "image";
        case DedupModality::multimodal: return "multimodal";
    }
    return "text";
}

struct DedupResult {
    Corpus kept;
    std::size_t removed_count = 0;
    // removed message_id -> the kept representative it duplicated
    std::map<std::string, std::string> duplicate_map;
};

/// Computes the dhash for every message image. Returns the ids of messages
/// whose image failed to decode; those messages are left unhashed and the
/// caller decides whether to drop them (the CLI dedup stage does).
inline std::vector<std::string> compute_corpus_hashes(Corpus& c, const std::string& base_dir = "") {
    std::vector<std::string> failed;
    for (Message& m : c.messages) {
        if (!m.image_ref || m.image_hash) continue;
        std::string path = *m.image_ref;
        if (!base_dir.empty() && !path.empty() && path[0] != '/') path = base_dir + "/" + path;
        try {
            m.image_hash = compute_dhash_file(path).bits;
        } catch (const DecodeError&) {
            failed.push_back(m.message_id);
        }
    }
    return failed;
}

namespace detail {

// Canonical scan order for dedup passes: (timestamp, message_id). First
// occurrence in this order wins.
inline std::vector<std::size_t> canonical_order(const Corpus& c) {
    std::vector<std::size_t> idx(c.messages.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const Message& ma = c.messages[a];
        const Message& mb = c.messages[b];
        if (ma.timestamp != mb.timestamp) return ma.timestamp < mb.timestamp;
        return ma.message_id < mb.message_id;
    });
    return idx;
}

inline void require_hashed(const Corpus& c, const char* op) {
    for (const Message& m : c.messages) {
        if (!m.image_hash)
            throw DataError(std::string(op) + ": message " + m.message_id + " has no image hash");
    }
}

}  // namespace detail

/// Base dedup: first occurrence of each (clean_text, dhash) pair.
inline DedupResult dedup_base(const Corpus& c) {
    if (c.stage != CorpusStage::paired)
        throw DataError("dedup_base: expected paired corpus, got " + std::string(to_string(c.stage)));
    detail::require_hashed(c, "dedup_base");
    DedupResult r;
    r.kept.period_label = c.period_label;
    r.kept.stage = CorpusStage::base_dedup;
    std::map<std::pair<std::string, std::uint64_t>, std::string> seen;
    for (std::size_t i : detail::canonical_order(c)) {
        const Message& m = c.messages[i];
        auto key = std::make_pair(m.clean_text, *m.image_hash);
        auto [it, inserted] = seen.emplace(key, m.message_id);
        if (inserted) {
            r.kept.messages.push_back(m);
        } else {
            ++r.removed_count;
            r.duplicate_map[m.message_id] = it->second;
        }
    }
    return r;
}

/// Modality-specific dedup over the base corpus. text: unique clean_text;
/// image: unique dhash; multimodal: a message is kept only if both its
/// clean_text and its dhash are unseen among previously kept messages.
inline DedupResult dedup_modality(const Corpus& c, DedupModality modality) {
    if (c.stage != CorpusStage::base_dedup)
        throw DataError("dedup_modality: expected base_dedup corpus, got " +
                        std::string(to_string(c.stage)));
    detail::require_hashed(c, "dedup_modality");
    DedupResult r;
    r.kept.period_label = c.period_label;
    switch (modality) {
        case DedupModality::text: r.kept.stage = CorpusStage::text_dedup; break;
        case DedupModality::image: r.kept.stage = CorpusStage::image_dedup; break;
        case DedupModality::multimodal: r.kept.stage = CorpusStage::multimodal_dedup; break;
    }
    std::unordered_map<std::string, std::string> seen_text;
    std::unordered_map<std::uint64_t, std::string> seen_hash;
    for (std::size_t i : detail::canonical_order(c)) {
        const Message& m = c.messages[i];
        bool text_dup = seen_text.count(m.clean_text) > 0;
        bool hash_dup = seen_hash.count(*m.image_hash) > 0;
        bool keep = false;
        switch (modality) {
            case DedupModality::text: keep = !text_dup; break;
            case DedupModality::image: keep = !hash_dup; break;
            case DedupModality::multimodal: keep = !text_dup && !hash_dup; break;
        }
        if (keep) {
            seen_text.emplace(m.clean_text, m.message_id);
            seen_hash.emplace(*m.image_hash, m.message_id);
            r.kept.messages.push_back(m);
        } else {
            ++r.removed_count;
            std::string rep;
            switch (modality) {
                case DedupModality::text: rep = seen_text.at(m.clean_text); break;
                case DedupModality::image: rep = seen_hash.at(*m.image_hash); break;
                case DedupModality::multimodal:
                    rep = text_dup ? seen_text.at(m.clean_text) : seen_hash.at(*m.image_hash);
                    break;
            }
            r.duplicate_map[m.message_id] = rep;
        }
    }
    return r;
}

}  // namespace mmt

#endif

#ifndef MMT_TOPIC_MODEL_HPP
#define MMT_TOPIC_MODEL_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "mmt/cluster.hpp"
#include "mmt/corpus.hpp"
#include "mmt/ctfidf.hpp"
#include "mmt/embedding.hpp"
#include "mmt/errors.hpp"
#include "mmt/reduce.hpp"

namespace mmt {

enum class Modality { text, image, multimodal };

inline const char* to_string(Modality m) {
    switch (m) {
        case Modality::text: return "text";
        case Modality::image: return "image";
        case Modality::multimodal: return "multimodal";
    }
    return "text";
}

inline std::optional<Modality> parse_modality(std::string_view s) {
    if (s == "text") return Modality::text;
    if (s == "image") return Modality::image;
    if (s == "multimodal") return Modality::multimodal;
    return std::nullopt;
}

/// Recorded alongside the config when reducer == "umap" so an external
/// backend sees the intended hyperparameters.
struct UmapParams {
    int n_neighbors = 15;
    double min_dist = 0.0;
    std::string metric = "cosine";
};

struct TopicModelConfig {
    int min_topic_size = 20;
    std::string reducer = "pca";  // pca | none | umap (external backend)
    int n_components = 5;
    UmapParams umap;
    std::string clusterer = "hdbscan";  // hdbscan | reference
    double reference_eps = 0.0;         // reference clusterer threshold; <=0 = auto
    std::uint64_t seed = 42;
    int top_k_keywords = 10;
    int n_representative_docs = 3;
    int n_representative_images = 9;
    std::string stopword_file;

    void validate() const {
        if (min_topic_size < 2) throw DataError("config: min_topic_size must be >= 2");
        if (n_components < 1) throw DataError("config: n_components must be >= 1");
        if (top_k_keywords < 1) throw DataError("config: top_k_keywords must be >= 1");
    }
};

inline nlohmann::json to_json(const TopicModelConfig& c) {
    nlohmann::json j;
    j["min_topic_size"] = c.min_topic_size;
    j["reducer"] = c.reducer;
    j["n_components"] = c.n_components;
    j["umap"] = {{"n_neighbors", c.umap.n_neighbors},
                 {"min_dist", c.umap.min_dist},
                 {"metric", c.umap.metric}};
    j["clusterer"] = c.clusterer;
    j["reference_eps"] = c.reference_eps;
    j["seed"] = c.seed;
    j["top_k_keywords"] = c.top_k_keywords;
    j["n_representative_docs"] = c.n_representative_docs;
    j["n_representative_images"] = c.n_representative_images;
    j["stopword_file"] = c.stopword_file;
    return j;
}

inline TopicModelConfig topic_config_from_json(const nlohmann::json& j) {
    TopicModelConfig c;
    c.min_topic_size = j.value("min_topic_size", c.min_topic_size);
    c.reducer = j.value("reducer", c.reducer);
    c.n_components = j.value("n_components", c.n_components);
    if (j.contains("umap")) {
        c.umap.n_neighbors = j["umap"].value("n_neighbors", c.umap.n_neighbors);
        c.umap.min_dist = j["umap"].value("min_dist", c.umap.min_dist);
        c.umap.metric = j["umap"].value("metric", c.umap.metric);
    }
    c.clusterer = j.value("clusterer", c.clusterer);
    c.reference_eps = j.value("reference_eps", c.reference_eps);
    c.seed = j.value("seed", c.seed);
    c.top_k_keywords = j.value("top_k_keywords", c.top_k_keywords);
    c.n_representative_docs = j.value("n_representative_docs", c.n_representative_docs);
    c.n_representative_images = j.value("n_representative_images", c.n_representative_images);
    c.stopword_file = j.value("stopword_file", c.stopword_file);
    return c;
}

enum class RepresentationSource { document_text, generated_captions };

inline const char* to_string(RepresentationSource s) {
    return s == RepresentationSource::document_text ? "document_text" : "generated_captions";
}

struct TopicInfo {
    int topic_id = 0;
    std::size_t size = 0;
    KeywordList keywords;  // weight non-increasing
    std::vector<std::string> representative_doc_ids;
    std::vector<std::string> representative_image_ids;  // image/multimodal only
    RepresentationSource representation_source = RepresentationSource::document_text;
};

struct TopicModelResult {
    Modality modality = Modality::text;
    TopicModelConfig config;
    std::vector<TopicInfo> topics;                    // ordered by topic_id
    std::map<std::string, int> assignments;           // message_id -> topic (-1 outlier)
    std::size_t n_documents = 0;

    const TopicInfo* find_topic(int topic_id) const {
        for (const auto& t : topics)
            if (t.topic_id == topic_id) return &t;
        return nullptr;
    }

    void check_invariants() const {
        if (assignments.size() != n_documents)
            throw DataError("topic model: assignments do not cover the fitted corpus");
        std::map<int, std::size_t> sizes;
        for (const auto& [id, t] : assignments)
            if (t >= 0) ++sizes[t];
        if (sizes.size() != topics.size())
            throw DataError("topic model: topic list does not match assignments");
        for (std::size_t i = 0; i < topics.size(); ++i) {
            const TopicInfo& t = topics[i];
            if (t.topic_id != static_cast<int>(i))
                throw DataError("topic model: topic ids not contiguous");
            if (sizes.count(t.topic_id) == 0 || sizes.at(t.topic_id) != t.size)
                throw DataError("topic model: stored size mismatch for topic " +
                                std::to_string(t.topic_id));
            if (t.size < static_cast<std::size_t>(config.min_topic_size))
                throw DataError("topic model: topic " + std::to_string(t.topic_id) +
                                " smaller than min_topic_size");
            if (i > 0 && topics[i - 1].size < t.size)
                throw DataError("topic model: topics not ordered by descending size");
            for (std::size_t k = 1; k < t.keywords.size(); ++k)
                if (t.keywords[k - 1].second < t.keywords[k].second)
                    throw DataError("topic model: keyword weights not non-increasing");
        }
    }
};

inline double outlier_ratio(const TopicModelResult& r) {
    if (r.n_documents == 0) throw DataError("outlier_ratio: empty result");
    std::size_t outliers = 0;
    for (const auto& [id, t] : r.assignments)
        if (t < 0) ++outliers;
    return static_cast<double>(outliers) / static_cast<double>(r.n_documents);
}

/// The n member documents whose embeddings are most cosine-similar to the
/// topic centroid; ties broken by message_id. n > topic size returns all
/// members.
inline std::vector<std::string> top_central_members(const EmbeddingMatrix& m,
                                                    const std::vector<std::size_t>& member_rows,
                                                    std::size_t n) {
    if (member_rows.empty()) throw DataError("representatives: empty topic");
    std::vector<double> centroid(m.dim, 0.0);
    for (std::size_t r : member_rows)
        for (std::size_t j = 0; j < m.dim; ++j) centroid[j] += m.row(r)[j];
    for (double& v : centroid) v /= static_cast<double>(member_rows.size());
    std::vector<float> centroid_f(centroid.begin(), centroid.end());
    std::vector<std::pair<double, std::string>> scored;
    scored.reserve(member_rows.size());
    for (std::size_t r : member_rows)
        scored.emplace_back(cosine(m.row(r), std::span<const float>(centroid_f)), m.ids[r]);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (n < scored.size()) scored.resize(n);
    std::vector<std::string> ids;
    ids.reserve(scored.size());
    for (auto& [s, id] : scored) ids.push_back(id);
    return ids;
}

/// reduce -> cluster -> c-TF-IDF -> representatives.
///
/// embeddings must be row-aligned with corpus.messages. Image models take
/// their textual representation from generated captions (aligned with the
/// corpus, "" entries contribute nothing); text/multimodal models use
/// clean_text.
inline TopicModelResult fit_topic_model(const Corpus& corpus, const EmbeddingMatrix& embeddings,
                                        const std::vector<std::string>* captions, Modality modality,
                                        const TopicModelConfig& cfg) {
    cfg.validate();
    const std::size_t n = corpus.messages.size();
    if (embeddings.rows != n) throw DataError("fit: embeddings not aligned with corpus");
    for (std::size_t i = 0; i < n; ++i)
        if (embeddings.ids[i] != corpus.messages[i].message_id)
            throw DataError("fit: embedding ids not aligned with corpus at row " + std::to_string(i));
    if (modality == Modality::image) {
        if (!captions) throw DataError("fit: image modality requires generated captions");
        if (captions->size() != n) throw DataError("fit: captions not aligned with corpus");
    }

    TopicModelResult result;
    result.modality = modality;
    result.config = cfg;
    result.n_documents = n;

    std::vector<int> labels(n, -1);
    if (n >= static_cast<std::size_t>(cfg.min_topic_size)) {
        auto reducer = make_reducer(cfg.reducer);
        int ncomp = cfg.n_components;
        if (cfg.reducer == "pca" && static_cast<std::size_t>(ncomp) >= embeddings.dim)
            ncomp = static_cast<int>(embeddings.dim) - 1;
        LowDimMatrix lowdim = reducer->reduce(embeddings, ncomp, cfg.seed);
        auto clusterer = make_clusterer(cfg.clusterer, cfg.reference_eps);
        labels = clusterer->cluster(lowdim, cfg.min_topic_size);
    }

    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < n; ++i) {
        result.assignments[corpus.messages[i].message_id] = labels[i];
        if (labels[i] >= 0) members[labels[i]].push_back(i);
    }
    for (const auto& [tid, rows] : members)
        if (rows.size() < static_cast<std::size_t>(cfg.min_topic_size))
            throw DataError("fit: clusterer returned a topic below min_topic_size");

    RepresentationSource source = modality == Modality::image
                                      ? RepresentationSource::generated_captions
                                      : RepresentationSource::document_text;
    auto doc_text = [&](std::size_t i) -> const std::string& {
        return source == RepresentationSource::generated_captions ? (*captions)[i]
                                                                  : corpus.messages[i].clean_text;
    };

    std::map<int, KeywordList> keywords;
    if (!members.empty()) {
        std::map<int, std::string> docs_by_topic;
        for (const auto& [tid, rows] : members) {
            std::string concat;
            for (std::size_t i : rows) {
                const std::string& d = doc_text(i);
                if (d.empty()) continue;
                if (!concat.empty()) concat += ' ';
                concat += d;
            }
            docs_by_topic[tid] = std::move(concat);
        }
        std::unordered_set<std::string> stopwords;
        const std::unordered_set<std::string>* sw = nullptr;
        if (!cfg.stopword_file.empty()) {
            stopwords = load_stopwords(cfg.stopword_file);
            sw = &stopwords;
        }
        keywords = ctfidf(docs_by_topic, cfg.top_k_keywords, sw);
    }

    for (const auto& [tid, rows] : members) {
        TopicInfo info;
        info.topic_id = tid;
        info.size = rows.size();
        info.keywords = keywords[tid];
        info.representation_source = source;
        info.representative_doc_ids =
            top_central_members(embeddings, rows, static_cast<std::size_t>(cfg.n_representative_docs));
        if (modality != Modality::text)
            info.representative_image_ids = top_central_members(
                embeddings, rows, static_cast<std::size_t>(cfg.n_representative_images));
        result.topics.push_back(std::move(info));
    }
    result.check_invariants();
    return result;
}

inline nlohmann::json to_json(const TopicModelResult& r) {
    nlohmann::json j;
    j["modality"] = to_string(r.modality);
    j["config"] = to_json(r.config);
    j["n_documents"] = r.n_documents;
    j["topics"] = nlohmann::json::array();
    for (const auto& t : r.topics) {
        nlohmann::json tj;
        tj["topic_id"] = t.topic_id;
        tj["size"] = t.size;
        tj["keywords"] = nlohmann::json::array();
        for (const auto& [term, w] : t.keywords) tj["keywords"].push_back({{"term", term}, {"weight", w}});
        tj["representative_doc_ids"] = t.representative_doc_ids;
        tj["representative_image_ids"] = t.representative_image_ids;
        tj["representation_source"] = to_string(t.representation_source);
        j["topics"].push_back(std::move(tj));
    }
    j["assignments"] = r.assignments;
    return j;
}

inline TopicModelResult topic_result_from_json(const nlohmann::json& j) {
    TopicModelResult r;
    auto m = parse_modality(j.at("modality").get<std::string>());
    if (!m) throw DataError("topic model json: bad modality");
    r.modality = *m;
    r.config = topic_config_from_json(j.at("config"));
    r.n_documents = j.at("n_documents").get<std::size_t>();
    for (const auto& tj : j.at("topics")) {
        TopicInfo t;
        t.topic_id = tj.at("topic_id").get<int>();
        t.size = tj.at("size").get<std::size_t>();
        for (const auto& kj : tj.at("keywords"))
            t.keywords.emplace_back(kj.at("term").get<std::string>(), kj.at("weight").get<double>());
        t.representative_doc_ids = tj.at("representative_doc_ids").get<std::vector<std::string>>();
        t.representative_image_ids =
            tj.at("representative_image_ids").get<std::vector<std::string>>();
        t.representation_source = tj.at("representation_source").get<std::string>() == "generated_captions"
                                      ? RepresentationSource::generated_captions
                                      : RepresentationSource::document_text;
        r.topics.push_back(std::move(t));
    }
    r.assignments = j.at("assignments").get<std::map<std::string, int>>();
    return r;
}

}  // namespace mmt

#endif

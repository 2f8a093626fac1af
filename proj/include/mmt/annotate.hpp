#ifndef MMT_ANNOTATE_HPP
#define MMT_ANNOTATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mmt/corpus.hpp"
#include "mmt/csv.hpp"
#include "mmt/embedding.hpp"
#include "mmt/errors.hpp"
#include "mmt/rng.hpp"
#include "mmt/topic_model.hpp"

namespace mmt {

enum class TopicType { content, content_unclear, advertising, caption };

inline const char* to_string(TopicType t) {
    switch (t) {
        case TopicType::content: return "content";
        case TopicType::content_unclear: return "content_unclear";
        case TopicType::advertising: return "advertising";
        case TopicType::caption: return "caption";
    }
    return "content_unclear";
}

inline std::optional<TopicType> parse_topic_type(std::string_view s) {
    if (s == "content") return TopicType::content;
    if (s == "content_unclear" || s == "content unclear") return TopicType::content_unclear;
    if (s == "advertising") return TopicType::advertising;
    if (s == "caption") return TopicType::caption;
    return std::nullopt;
}

enum class ImageType { photo, screenshot_news, screenshot_social_media, meme, infographic, map, other };

inline const char* to_string(ImageType t) {
    switch (t) {
        case ImageType::photo: return "photo";
        case ImageType::screenshot_news: return "screenshot_news";
        case ImageType::screenshot_social_media: return "screenshot_social_media";
        case ImageType::meme: return "meme";
        case ImageType::infographic: return "infographic";
        case ImageType::map: return "map";
        case ImageType::other: return "other";
    }
    return "other";
}

inline std::optional<ImageType> parse_image_type(std::string_view s) {
    if (s == "photo") return ImageType::photo;
    if (s == "screenshot_news" || s == "screenshot news") return ImageType::screenshot_news;
    if (s == "screenshot_social_media" || s == "screenshot social media")
        return ImageType::screenshot_social_media;
    if (s == "meme") return ImageType::meme;
    if (s == "infographic") return ImageType::infographic;
    if (s == "map") return ImageType::map;
    if (s == "other") return ImageType::other;
    return std::nullopt;
}

/// Review sheets may carry labels from the un-reduced annotation scheme;
/// those collapse into `other` so the label space stays closed for
/// metrics. Unknown strings stay unparsed (caller decides).
inline std::optional<ImageType> parse_image_type_lenient(std::string_view s) {
    if (auto t = parse_image_type(s)) return t;
    for (const char* legacy :
         {"photo with text", "photo_with_text", "photo comic", "photo_comic", "photo black-white",
          "photo_black_white", "quote image", "quote_image", "graphic", "book cover", "book_cover",
          "poster", "document", "template"}) {
        if (s == legacy) return ImageType::other;
    }
    return std::nullopt;
}

enum class AnnotationSource { human, llm };

struct TopicAnnotation {
    int topic_id = 0;
    Modality modality = Modality::text;
    std::string name;  // empty iff topic_type != content
    TopicType topic_type = TopicType::content_unclear;
    std::optional<ImageType> image_type;  // present iff modality != text
    std::string group = "Misc";
    AnnotationSource source = AnnotationSource::human;
    std::int64_t annotated_at = 0;
    bool validation_flag = false;

    void validate() const {
        if (!name.empty() && topic_type != TopicType::content)
            throw DataError("annotation: topic " + std::to_string(topic_id) +
                            " has a name but topic_type != content");
        bool wants_image = modality != Modality::text;
        if (wants_image != image_type.has_value())
            throw DataError("annotation: topic " + std::to_string(topic_id) +
                            " image_type presence does not match modality");
    }
};

// ---------------------------------------------------------------------------
// Review sheets

inline const std::vector<std::string>& review_sheet_header() {
    static const std::vector<std::string> header = {
        "topic_id", "modality",  "size",       "keywords", "rep_texts",
        "rep_image_paths", "name", "topic_type", "image_type", "group"};
    return header;
}

/// One row per topic with its keywords and representatives, plus empty
/// annotation columns for the human annotator.
inline void make_review_sheet(const TopicModelResult& r, const Corpus& corpus,
                              const std::string& path) {
    std::map<std::string, const Message*> by_id;
    for (const Message& m : corpus.messages) by_id[m.message_id] = &m;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("review sheet: cannot write " + path);
    out << csv_row(review_sheet_header());
    for (const TopicInfo& t : r.topics) {
        std::vector<std::string> kw;
        for (const auto& [term, w] : t.keywords) kw.push_back(term);
        std::vector<std::string> texts, image_paths;
        // Image-only topics are annotated from their representative images;
        // message text appears only for text/multimodal topics.
        if (r.modality != Modality::image) {
            for (const std::string& id : t.representative_doc_ids) {
                auto it = by_id.find(id);
                if (it != by_id.end()) texts.push_back(it->second->clean_text);
            }
        }
        if (r.modality != Modality::text) {
            for (const std::string& id : t.representative_image_ids) {
                auto it = by_id.find(id);
                if (it != by_id.end() && it->second->image_ref)
                    image_paths.push_back(*it->second->image_ref);
            }
        }
        out << csv_row({std::to_string(t.topic_id), to_string(r.modality), std::to_string(t.size),
                        join(kw, "|"), join(texts, " || "), join(image_paths, "|"), "", "", "", ""});
    }
    if (!out) throw DataError("review sheet: write failed for " + path);
}

inline void write_annotations_csv(const std::vector<TopicAnnotation>& annotations,
                                  const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("annotations: cannot write " + path);
    out << csv_row(review_sheet_header());
    for (const TopicAnnotation& a : annotations) {
        out << csv_row({std::to_string(a.topic_id), to_string(a.modality), "", "", "", "", a.name,
                        to_string(a.topic_type), a.image_type ? to_string(*a.image_type) : "",
                        a.group.empty() ? "Misc" : a.group});
    }
    if (!out) throw DataError("annotations: write failed for " + path);
}

/// Reads back a (partially) filled review sheet. Rows whose annotation
/// columns are all empty are skipped; filled rows round-trip losslessly.
inline std::vector<TopicAnnotation> read_review_sheet(const std::string& path,
                                                      AnnotationSource source = AnnotationSource::human) {
    auto rows = csv_read_file(path);
    if (rows.empty()) throw DataError("review sheet: empty file " + path);
    const auto& header = review_sheet_header();
    if (rows[0] != header) throw DataError("review sheet: unexpected header in " + path);
    std::vector<TopicAnnotation> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        auto& row = rows[i];
        if (row.size() != header.size())
            throw DataError("review sheet: row " + std::to_string(i + 1) + " has " +
                            std::to_string(row.size()) + " fields");
        const std::string& name = row[6];
        const std::string& type_s = row[7];
        const std::string& image_s = row[8];
        const std::string& group = row[9];
        if (name.empty() && type_s.empty() && image_s.empty() && group.empty()) continue;
        TopicAnnotation a;
        a.topic_id = std::stoi(row[0]);
        auto modality = parse_modality(row[1]);
        if (!modality) throw DataError("review sheet: bad modality '" + row[1] + "'");
        a.modality = *modality;
        a.name = name;
        auto tt = parse_topic_type(type_s);
        if (!tt) throw DataError("review sheet: bad topic_type '" + type_s + "' in row " +
                                 std::to_string(i + 1));
        a.topic_type = *tt;
        if (!image_s.empty()) {
            auto it = parse_image_type_lenient(image_s);
            if (!it) throw DataError("review sheet: bad image_type '" + image_s + "' in row " +
                                     std::to_string(i + 1));
            a.image_type = *it;
        }
        a.group = group.empty() ? "Misc" : group;
        a.source = source;
        a.validate();
        out.push_back(std::move(a));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Agreement and quality metrics

/// Cohen's kappa: (p_o - p_e) / (1 - p_e), p_e from marginal products.
inline double cohens_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.size() != b.size()) throw DataError("cohens_kappa: length mismatch");
    if (a.empty()) throw DataError("cohens_kappa: empty label vectors");
    const double n = static_cast<double>(a.size());
    std::map<std::string, double> ma, mb;
    double agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma[a[i]] += 1;
        mb[b[i]] += 1;
        if (a[i] == b[i]) agree += 1;
    }
    double po = agree / n;
    double pe = 0;
    for (const auto& [label, ca] : ma) {
        auto it = mb.find(label);
        if (it != mb.end()) pe += (ca / n) * (it->second / n);
    }
    if (pe >= 1.0 - 1e-15) {
        if (po >= 1.0 - 1e-15) return 1.0;
        throw DataError("cohens_kappa: expected agreement is 1 but observed is not; kappa undefined");
    }
    return (po - pe) / (1.0 - pe);
}

/// Unweighted mean of per-class F1, classes taken from gold. A class never
/// predicted contributes 0.
inline double macro_f1(const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
    if (gold.size() != pred.size()) throw DataError("macro_f1: length mismatch");
    if (gold.empty()) throw DataError("macro_f1: empty label vectors");
    std::set<std::string> classes(gold.begin(), gold.end());
    std::map<std::string, double> tp, fp, fn;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] == pred[i]) tp[gold[i]] += 1;
        else {
            fn[gold[i]] += 1;
            fp[pred[i]] += 1;
        }
    }
    double sum = 0;
    for (const auto& c : classes) {
        double t = tp[c], p = t + fp[c], g = t + fn[c];
        double prec = p > 0 ? t / p : 0.0;
        double rec = g > 0 ? t / g : 0.0;
        sum += (prec + rec) > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    }
    return sum / static_cast<double>(classes.size());
}

struct NameSimilarity {
    std::vector<double> per_pair;
    double median = 0;
};

/// Cosine similarity between aligned manual and generated topic names on
/// normalized text embeddings, plus the median.
inline NameSimilarity name_similarity(const std::vector<std::string>& manual,
                                      const std::vector<std::string>& generated,
                                      const TextEmbedder& embedder,
                                      EmbeddingCache* cache = nullptr) {
    if (manual.empty() || manual.size() != generated.size())
        throw DataError("name_similarity: need equal-length non-empty name lists");
    if (embedder.space() != EmbedSpace::text_only)
        throw DataError("name_similarity: embedder must be a text_only-space model");
    std::vector<std::string> ids_a, ids_b;
    for (std::size_t i = 0; i < manual.size(); ++i) {
        ids_a.push_back("a" + std::to_string(i));
        ids_b.push_back("b" + std::to_string(i));
    }
    EmbeddingMatrix ma = embed_texts(embedder, manual, ids_a, cache);
    EmbeddingMatrix mb = embed_texts(embedder, generated, ids_b, cache);
    NameSimilarity out;
    for (std::size_t i = 0; i < manual.size(); ++i)
        out.per_pair.push_back(dot(ma.row(i), mb.row(i)));
    std::vector<double> sorted = out.per_pair;
    std::sort(sorted.begin(), sorted.end());
    std::size_t n = sorted.size();
    out.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    return out;
}

struct AnnotationDistribution {
    std::map<std::string, double> topic_type;  // proportions over all annotations
    std::map<std::string, double> image_type;  // proportions over annotations carrying one
};

inline AnnotationDistribution annotation_distribution(const std::vector<TopicAnnotation>& annotations) {
    AnnotationDistribution d;
    if (annotations.empty()) return d;
    std::map<std::string, std::size_t> tt;
    std::map<std::string, std::size_t> it;
    std::size_t with_image = 0;
    for (const auto& a : annotations) {
        ++tt[to_string(a.topic_type)];
        if (a.image_type) {
            ++it[to_string(*a.image_type)];
            ++with_image;
        }
    }
    for (auto& [k, v] : tt)
        d.topic_type[k] = static_cast<double>(v) / static_cast<double>(annotations.size());
    for (auto& [k, v] : it)
        d.image_type[k] = static_cast<double>(v) / static_cast<double>(with_image);
    return d;
}

/// Seeded uniform sample of topic ids (without replacement) for
/// re-annotation agreement studies, e.g. 50 topics per modality.
inline std::vector<int> sample_topics(int n_topics, int sample_size, std::uint64_t seed) {
    std::vector<int> ids(static_cast<std::size_t>(n_topics));
    for (int i = 0; i < n_topics; ++i) ids[static_cast<std::size_t>(i)] = i;
    Rng rng(seed);
    rng.shuffle(ids);
    if (static_cast<int>(ids.size()) > sample_size) ids.resize(static_cast<std::size_t>(sample_size));
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace mmt

#endif

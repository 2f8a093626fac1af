#ifndef MMT_SYNTH_HPP
#define MMT_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mmt/corpus.hpp"
#include "mmt/dhash.hpp"
#include "mmt/embedding.hpp"
#include "mmt/errors.hpp"
#include "mmt/image.hpp"
#include "mmt/rng.hpp"

namespace mmt {

/// Ground-truth corpus generator. Every document gets a planted text topic
/// and an image topic; the image topic agrees with the text topic for an
/// exact seeded quota of round(agreement * size) documents per topic and
/// otherwise shifts to the next topic (cyclic). image_refinement > 1
/// splits each text topic into R image subtopics with their own
/// directions, so the image model is strictly finer than the text model.
struct SynthConfig {
    int n_topics = 5;
    int docs_per_topic = 200;
    double outlier_fraction = 0.0;
    std::size_t dimension = 32;
    double signal_text = 0.95;
    double signal_image = 0.95;
    double text_image_agreement = 1.0;
    std::uint64_t seed = 1;
    int image_refinement = 1;
    std::vector<double> topic_size_weights;  // empty = uniform
    std::string period_label = "synth";
    std::string start_day = "2023-10-01";
    int n_days = 28;
    int n_channels = 4;

    void validate() const {
        if (n_topics < 1) throw DataError("synth: n_topics must be >= 1");
        if (docs_per_topic < 1) throw DataError("synth: docs_per_topic must be >= 1");
        if (outlier_fraction < 0 || outlier_fraction >= 1)
            throw DataError("synth: outlier_fraction must be in [0,1)");
        if (signal_text < 0 || signal_text > 1 || signal_image < 0 || signal_image > 1)
            throw DataError("synth: signal strengths must be in [0,1]");
        if (text_image_agreement < 0 || text_image_agreement > 1)
            throw DataError("synth: text_image_agreement must be in [0,1]");
        if (image_refinement < 1) throw DataError("synth: image_refinement must be >= 1");
        if (!topic_size_weights.empty() &&
            topic_size_weights.size() != static_cast<std::size_t>(n_topics))
            throw DataError("synth: topic_size_weights must have n_topics entries");
        std::size_t n_directions = static_cast<std::size_t>(n_topics) +
                                   (image_refinement > 1 ? static_cast<std::size_t>(n_topics) *
                                                               static_cast<std::size_t>(image_refinement)
                                                         : 0);
        if (n_directions > dimension)
            throw DataError("synth: need " + std::to_string(n_directions) +
                            " orthogonal directions but dimension is " +
                            std::to_string(dimension) + "; raise dimension or lower n_topics");
    }
};

struct GroundTruth {
    std::map<std::string, int> text_topic;   // -1 = planted noise
    std::map<std::string, int> image_topic;  // k * R + r, -1 = planted noise
    std::vector<std::vector<float>> text_directions;
    std::vector<std::vector<float>> image_directions;
};

struct SynthBundle {
    Corpus corpus;  // stage = paired: every message has text + image
    std::vector<Raster> images;  // aligned with corpus.messages
    EmbeddingMatrix text;
    EmbeddingMatrix image;
    EmbeddingMatrix fused;
    GroundTruth truth;

    std::vector<int> planted_text_labels() const {
        std::vector<int> out;
        out.reserve(corpus.messages.size());
        for (const auto& m : corpus.messages) out.push_back(truth.text_topic.at(m.message_id));
        return out;
    }
    std::vector<int> planted_image_labels() const {
        std::vector<int> out;
        out.reserve(corpus.messages.size());
        for (const auto& m : corpus.messages) out.push_back(truth.image_topic.at(m.message_id));
        return out;
    }
};

namespace detail {

inline std::vector<std::vector<float>> orthonormal_directions(std::size_t count, std::size_t dim,
                                                              Rng& rng) {
    std::vector<std::vector<float>> dirs;
    dirs.reserve(count);
    while (dirs.size() < count) {
        std::vector<float> v(dim);
        for (auto& x : v) x = static_cast<float>(rng.gaussian());
        // Gram-Schmidt against the accepted directions.
        for (const auto& u : dirs) {
            double proj = 0;
            for (std::size_t i = 0; i < dim; ++i) proj += static_cast<double>(v[i]) * u[i];
            for (std::size_t i = 0; i < dim; ++i) v[i] -= static_cast<float>(proj * u[i]);
        }
        double norm2 = 0;
        for (float x : v) norm2 += static_cast<double>(x) * x;
        if (norm2 < 1e-6) continue;  // essentially in the span; redraw
        double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : v) x = static_cast<float>(x * inv);
        dirs.push_back(std::move(v));
    }
    return dirs;
}

inline std::vector<float> noisy_direction(const std::vector<float>& dir, double signal, Rng& rng) {
    std::size_t dim = dir.size();
    std::vector<float> g(dim);
    double n2 = 0;
    for (auto& x : g) {
        x = static_cast<float>(rng.gaussian());
        n2 += static_cast<double>(x) * x;
    }
    double inv = n2 > 0 ? 1.0 / std::sqrt(n2) : 0.0;
    std::vector<float> v(dim);
    double out2 = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        v[i] = static_cast<float>(signal * dir[i] + (1.0 - signal) * g[i] * inv);
        out2 += static_cast<double>(v[i]) * v[i];
    }
    double vinv = out2 > 0 ? 1.0 / std::sqrt(out2) : 0.0;
    for (auto& x : v) x = static_cast<float>(x * vinv);
    return v;
}

// Pseudo-word vocabulary: pronounceable, deterministic, distinct across
// topics.
inline std::string synth_word(std::uint64_t key) {
    static const char* on[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
                               "br", "kr", "st", "tr"};
    static const char* nu[] = {"a", "e", "i", "o", "u", "au", "ei", "ou"};
    Rng rng(key * 0x9e3779b97f4a7c15ULL + 17);
    std::string w;
    int syllables = 2 + static_cast<int>(rng.below(2));
    for (int s = 0; s < syllables; ++s) {
        w += on[rng.below(18)];
        w += nu[rng.below(8)];
    }
    return w;
}

/// 9x8 RGB raster whose mean color sits in the palette bucket of
/// image_topic and whose dhash equals the 64-bit counter exactly: within
/// each row, pixel x steps down by 2 whenever dhash bit (y,x) is set, so
/// the strict left-to-right comparison reproduces the bit. The +-16 range
/// of the encoding never leaves the color bucket.
inline Raster synth_raster(int image_topic, std::uint64_t counter, bool noise_doc) {
    Raster img;
    img.width = 9;
    img.height = 8;
    img.channels = 3;
    img.pixels.resize(9 * 8 * 3);
    // Topic buckets use even 32-wide bucket indices per channel, noise docs
    // odd ones, so a noise image can never land in a topic bucket.
    int base_rgb[3];
    if (noise_doc) {
        Rng rng(counter ^ 0xd00dfeedULL);
        for (int c = 0; c < 3; ++c) base_rgb[c] = 32 * (2 * static_cast<int>(rng.below(4)) + 1) + 8;
    } else {
        int idx = image_topic;
        for (int c = 0; c < 3; ++c) {
            base_rgb[c] = 32 * (2 * (idx % 4)) + 8;
            idx /= 4;
        }
    }
    for (int y = 0; y < 8; ++y) {
        int ones = 0;
        for (int x = 0; x < 8; ++x)
            if ((counter >> (63 - (y * 8 + x))) & 1ULL) ++ones;
        int level = 2 * ones;
        for (int x = 0; x < 9; ++x) {
            for (int c = 0; c < 3; ++c)
                img.pixels[(static_cast<std::size_t>(y) * 9 + static_cast<std::size_t>(x)) * 3 +
                           static_cast<std::size_t>(c)] =
                    static_cast<std::uint8_t>(base_rgb[c] + level);
            if (x < 8 && ((counter >> (63 - (y * 8 + x))) & 1ULL)) level -= 2;
        }
    }
    return img;
}

}  // namespace detail

/// Deterministic generation: same config (incl. seed) -> bit-identical
/// corpus, rasters, matrices and ground truth.
inline SynthBundle generate(const SynthConfig& cfg) {
    cfg.validate();
    const int K = cfg.n_topics;
    const int R = cfg.image_refinement;
    Rng root(cfg.seed);
    Rng dir_rng = root.fork(1);
    Rng noise_rng = root.fork(2);
    Rng doc_rng = root.fork(3);

    SynthBundle b;
    b.corpus.period_label = cfg.period_label;
    b.corpus.stage = CorpusStage::paired;

    // Directions: text topics first; refined image subtopics afterwards
    // (R == 1 reuses the text directions, so image topics equal text topics).
    std::size_t n_dirs = static_cast<std::size_t>(K) +
                         (R > 1 ? static_cast<std::size_t>(K) * static_cast<std::size_t>(R) : 0);
    auto dirs = detail::orthonormal_directions(n_dirs, cfg.dimension, dir_rng);
    b.truth.text_directions.assign(dirs.begin(), dirs.begin() + K);
    if (R > 1) b.truth.image_directions.assign(dirs.begin() + K, dirs.end());
    else b.truth.image_directions = b.truth.text_directions;

    std::vector<std::size_t> sizes(static_cast<std::size_t>(K));
    std::size_t total_topic_docs = 0;
    for (int k = 0; k < K; ++k) {
        double w = cfg.topic_size_weights.empty() ? 1.0 : cfg.topic_size_weights[static_cast<std::size_t>(k)];
        sizes[static_cast<std::size_t>(k)] =
            static_cast<std::size_t>(std::llround(w * cfg.docs_per_topic));
        if (sizes[static_cast<std::size_t>(k)] == 0)
            throw DataError("synth: topic size weight produced an empty topic");
        total_topic_docs += sizes[static_cast<std::size_t>(k)];
    }
    std::size_t n_noise = static_cast<std::size_t>(std::llround(
        cfg.outlier_fraction / (1.0 - cfg.outlier_fraction) * static_cast<double>(total_topic_docs)));
    std::size_t total = total_topic_docs + n_noise;

    std::int64_t day0 = 0;
    if (!parse_iso8601(cfg.start_day + "T00:00:00Z", day0))
        throw DataError("synth: bad start_day " + cfg.start_day);

    b.text.dim = b.image.dim = cfg.dimension;
    b.text.normalized = b.image.normalized = true;
    b.text.embedder_name = "synth-text";
    b.image.embedder_name = "synth-image";

    std::uint64_t counter = 1;
    auto add_doc = [&](int text_topic, int image_topic, const std::string& text_body,
                       const std::vector<float>& tvec, const std::vector<float>& ivec) {
        Message m;
        char idbuf[16];
        std::snprintf(idbuf, sizeof(idbuf), "m%06llu", static_cast<unsigned long long>(counter));
        m.message_id = idbuf;
        m.channel_id = "ch" + std::to_string(counter % static_cast<std::uint64_t>(cfg.n_channels));
        m.channel_category = static_cast<ChannelCategory>(counter % 7);
        std::size_t i = b.corpus.messages.size();
        m.timestamp = day0 + static_cast<std::int64_t>(i % static_cast<std::size_t>(cfg.n_days)) * 86400 +
                      static_cast<std::int64_t>((counter * 7919) % 86400);
        m.raw_text = text_body;
        m.clean_text = clean_text(m.raw_text);
        m.image_ref = "images/" + m.message_id + ".ppm";
        m.is_service = false;
        b.truth.text_topic[m.message_id] = text_topic;
        b.truth.image_topic[m.message_id] = image_topic;
        b.images.push_back(detail::synth_raster(image_topic, counter, text_topic < 0));
        m.image_hash = 0;  // filled below from the raster
        b.corpus.messages.push_back(std::move(m));
        b.text.ids.push_back(idbuf);
        b.image.ids.push_back(idbuf);
        b.text.data.insert(b.text.data.end(), tvec.begin(), tvec.end());
        b.image.data.insert(b.image.data.end(), ivec.begin(), ivec.end());
        ++counter;
    };

    for (int k = 0; k < K; ++k) {
        std::size_t s = sizes[static_cast<std::size_t>(k)];
        // Exact agreement quota, seeded assignment of which docs disagree.
        std::size_t n_agree =
            static_cast<std::size_t>(std::llround(cfg.text_image_agreement * static_cast<double>(s)));
        std::vector<int> agree_flags(s, 0);
        for (std::size_t i = 0; i < n_agree; ++i) agree_flags[i] = 1;
        Rng topic_rng = doc_rng.fork(static_cast<std::uint64_t>(k));
        topic_rng.shuffle(agree_flags);
        std::size_t agree_rank = 0, disagree_rank = 0;
        for (std::size_t i = 0; i < s; ++i) {
            bool agrees = agree_flags[i] == 1;
            int img_parent = agrees ? k : (k + 1) % K;
            int r = static_cast<int>((agrees ? agree_rank++ : disagree_rank++) % static_cast<std::size_t>(R));
            int image_topic = img_parent * R + r;
            const auto& tdir = b.truth.text_directions[static_cast<std::size_t>(k)];
            const auto& idir = b.truth.image_directions[static_cast<std::size_t>(image_topic)];
            auto tvec = detail::noisy_direction(tdir, cfg.signal_text, topic_rng);
            auto ivec = detail::noisy_direction(idir, cfg.signal_image, topic_rng);
            // Template text: anchor words tie the document to its topic,
            // two variable words add vocabulary spread, the trailing token
            // keeps every text unique. Raw text carries a URL, a mention
            // and a hashtag so ingestion cleaning is exercised end to end.
            std::string body = "#";
            for (int a = 0; a < 10; ++a) {
                if (a) body += " ";
                body += detail::synth_word(static_cast<std::uint64_t>(k) * 131 + static_cast<std::uint64_t>(a));
            }
            for (int vword = 0; vword < 2; ++vword)
                body += " " + detail::synth_word(static_cast<std::uint64_t>(k) * 131 + 10 +
                                                 topic_rng.below(7));
            body += " u" + std::to_string(counter);
            body += " https://example.com/p/" + std::to_string(counter) + " @poster";
            add_doc(k, image_topic, body, tvec, ivec);
        }
    }
    for (std::size_t i = 0; i < n_noise; ++i) {
        std::vector<float> zero(cfg.dimension, 0.0f);
        auto tvec = detail::noisy_direction(zero, 0.0, noise_rng);
        auto ivec = detail::noisy_direction(zero, 0.0, noise_rng);
        std::string body;
        for (int w = 0; w < 6; ++w)
            body += (w ? " " : "") + detail::synth_word(0xabcdef00ULL + noise_rng.below(4096));
        body += " u" + std::to_string(counter);
        add_doc(-1, -1, body, tvec, ivec);
    }

    b.text.rows = b.image.rows = total;
    for (std::size_t i = 0; i < total; ++i)
        b.corpus.messages[i].image_hash = compute_dhash(b.images[i]).bits;
    b.fused = fuse_multimodal(b.text, b.image);
    b.fused.embedder_name = "synth-fused";
    return b;
}

/// Materializes the bundle for the CLI: corpus.jsonl plus images/*.ppm
/// under dir. The written corpus is exactly what ingest expects.
inline void write_corpus_files(const SynthBundle& b, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "images");
    for (std::size_t i = 0; i < b.corpus.messages.size(); ++i) {
        const Message& m = b.corpus.messages[i];
        encode_image_file(b.images[i], (dir / *m.image_ref).string());
    }
    // The ingest contract re-derives clean text and pairing; write the raw
    // fields only (plus ids/timestamps), without dedup-stage extras.
    Corpus raw = b.corpus;
    for (Message& m : raw.messages) m.image_hash.reset();
    write_messages(raw, (dir / "corpus.jsonl").string());
}

/// Adjusted Rand index between two labelings (outliers are ordinary
/// labels). 1.0 for identical partitions up to relabeling, ~0 for
/// independent ones.
inline double ari(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw DataError("ari: length mismatch");
    if (a.empty()) throw DataError("ari: empty labelings");
    std::map<std::pair<int, int>, double> cont;
    std::map<int, double> arow, bcol;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cont[{a[i], b[i]}] += 1;
        arow[a[i]] += 1;
        bcol[b[i]] += 1;
    }
    auto comb2 = [](double x) { return x * (x - 1) / 2.0; };
    double sum_ij = 0, sum_a = 0, sum_b = 0;
    for (auto& [k, v] : cont) sum_ij += comb2(v);
    for (auto& [k, v] : arow) sum_a += comb2(v);
    for (auto& [k, v] : bcol) sum_b += comb2(v);
    double n2 = comb2(static_cast<double>(a.size()));
    double expected = sum_a * sum_b / n2;
    double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;  // both partitions trivial
    return (sum_ij - expected) / (max_index - expected);
}

}  // namespace mmt

#endif

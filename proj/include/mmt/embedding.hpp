#ifndef MMT_EMBEDDING_HPP
#define MMT_EMBEDDING_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mmt/errors.hpp"
#include "mmt/hashutil.hpp"
#include "mmt/image.hpp"
#include "mmt/rng.hpp"
#include "mmt/text.hpp"

namespace mmt {

enum class EmbedSpace { text_only, joint_text_image };

inline const char* to_string(EmbedSpace s) {
    return s == EmbedSpace::text_only ? "text_only" : "joint_text_image";
}

/// Row-major N x D float matrix with row-aligned message ids.
struct EmbeddingMatrix {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<float> data;
    std::vector<std::string> ids;
    std::string embedder_name;
    bool normalized = false;

    std::span<const float> row(std::size_t i) const {
        return std::span<const float>(data.data() + i * dim, dim);
    }
    std::span<float> row(std::size_t i) { return std::span<float>(data.data() + i * dim, dim); }

    void check_invariants() const {
        if (ids.size() != rows) throw DataError("embedding matrix: ids/rows mismatch");
        if (data.size() != rows * dim) throw DataError("embedding matrix: data size mismatch");
        std::unordered_set<std::string> seen(ids.begin(), ids.end());
        if (seen.size() != ids.size()) throw DataError("embedding matrix: duplicate ids");
        if (normalized) {
            for (std::size_t i = 0; i < rows; ++i) {
                double n = 0;
                for (float v : row(i)) n += static_cast<double>(v) * v;
                if (std::abs(std::sqrt(n) - 1.0) > 1e-5)
                    throw DataError("embedding matrix: row " + std::to_string(i) + " not unit norm");
            }
        }
    }
};

inline void l2_normalize(std::span<float> v) {
    double n = 0;
    for (float x : v) n += static_cast<double>(x) * x;
    n = std::sqrt(n);
    if (n == 0) return;  // zero vector stays zero; callers treat as degenerate
    for (float& x : v) x = static_cast<float>(x / n);
}

inline double dot(std::span<const float> a, std::span<const float> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
    return s;
}

inline double cosine(std::span<const float> a, std::span<const float> b) {
    double na = std::sqrt(dot(a, a));
    double nb = std::sqrt(dot(b, b));
    if (na == 0 || nb == 0) return 0.0;
    return dot(a, b) / (na * nb);
}

/// Thread-safe embedding cache keyed by (embedder name, content
/// fingerprint). Stores the normalized vectors, so hits are bit-identical
/// to the original computation.
class EmbeddingCache {
public:
    bool lookup(const std::string& key, std::vector<float>& out) const {
        std::shared_lock lock(mu_);
        auto it = map_.find(key);
        if (it == map_.end()) return false;
        out = it->second;
        return true;
    }

    void insert(const std::string& key, std::vector<float> v) {
        std::unique_lock lock(mu_);
        map_.emplace(key, std::move(v));
    }

    std::size_t size() const {
        std::shared_lock lock(mu_);
        return map_.size();
    }

private:
    mutable std::shared_mutex mu_;
    std::unordered_map<std::string, std::vector<float>> map_;
};

class TextEmbedder {
public:
    virtual ~TextEmbedder() = default;
    virtual std::string name() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual EmbedSpace space() const = 0;
    /// Writes a raw (not yet normalized) embedding into out (size dimension()).
    virtual void embed(std::string_view text, std::span<float> out) const = 0;
};

class ImageEmbedder {
public:
    virtual ~ImageEmbedder() = default;
    virtual std::string name() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual EmbedSpace space() const = 0;
    virtual void embed(const Raster& image, std::span<float> out) const = 0;
};

namespace detail {
inline void hashed_direction(std::uint64_t seed, std::span<float> out) {
    Rng rng(seed);
    for (float& v : out) v = static_cast<float>(rng.gaussian());
}
}  // namespace detail

/// Deterministic fixture text embedder. Two modes:
///  - content: one pseudo-random unit direction per distinct input string.
///  - token_mix: mean of per-token directions, so texts sharing vocabulary
///    land near each other. This is what makes the synthetic corpus
///    clusterable end-to-end without model weights.
class FixtureTextEmbedder final : public TextEmbedder {
public:
    enum class Mode { content, token_mix };

    FixtureTextEmbedder(std::size_t dim, std::uint64_t seed, Mode mode,
                        EmbedSpace space = EmbedSpace::text_only, std::string name_suffix = "")
        : dim_(dim), seed_(seed), mode_(mode), space_(space) {
        name_ = std::string("fixture-text-") + (mode == Mode::content ? "content" : "tokenmix") +
                "-d" + std::to_string(dim) + "-s" + std::to_string(seed) + name_suffix;
    }

    std::string name() const override { return name_; }
    std::size_t dimension() const override { return dim_; }
    EmbedSpace space() const override { return space_; }

    void embed(std::string_view text, std::span<float> out) const override {
        std::fill(out.begin(), out.end(), 0.0f);
        if (mode_ == Mode::content) {
            detail::hashed_direction(fnv1a64(text) ^ seed_, out);
            return;
        }
        std::vector<std::string> tokens = tokenize(text, 1);
        if (tokens.empty()) {
            detail::hashed_direction(fnv1a64(text) ^ seed_, out);
            return;
        }
        std::vector<float> dir(dim_);
        for (const std::string& t : tokens) {
            detail::hashed_direction(fnv1a64(t) ^ seed_, dir);
            l2_normalize(dir);
            for (std::size_t i = 0; i < dim_; ++i) out[i] += dir[i];
        }
        for (float& v : out) v /= static_cast<float>(tokens.size());
    }

private:
    std::size_t dim_;
    std::uint64_t seed_;
    Mode mode_;
    EmbedSpace space_;
    std::string name_;
};

/// Deterministic fixture image embedder: direction keyed to the quantized
/// mean color (so near-flat rasters of one palette entry form a tight
/// cluster), blended with a per-image direction from the raw bytes.
class FixtureImageEmbedder final : public ImageEmbedder {
public:
    FixtureImageEmbedder(std::size_t dim, std::uint64_t seed, double color_signal = 0.95)
        : dim_(dim), seed_(seed), signal_(color_signal) {
        name_ = "fixture-image-color-d" + std::to_string(dim) + "-s" + std::to_string(seed);
    }

    std::string name() const override { return name_; }
    std::size_t dimension() const override { return dim_; }
    EmbedSpace space() const override { return EmbedSpace::joint_text_image; }

    void embed(const Raster& img, std::span<float> out) const override {
        double mean[3] = {0, 0, 0};
        std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
        for (std::size_t i = 0; i < n; ++i) {
            for (int ch = 0; ch < 3; ++ch) {
                int c = img.channels == 3 ? ch : 0;
                mean[ch] += img.pixels[i * static_cast<std::size_t>(img.channels) +
                                       static_cast<std::size_t>(c)];
            }
        }
        // 8 buckets per channel; palette colors are spaced wider than any
        // per-message stripe perturbation.
        std::uint64_t bucket = 0;
        for (int ch = 0; ch < 3; ++ch)
            bucket = bucket * 8 + static_cast<std::uint64_t>(mean[ch] / static_cast<double>(n) / 32.0);
        std::vector<float> color_dir(dim_), noise_dir(dim_);
        detail::hashed_direction(bucket ^ seed_ ^ 0xc01030f00dULL, color_dir);
        l2_normalize(color_dir);
        std::string_view bytes(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
        detail::hashed_direction(fnv1a64(bytes) ^ seed_, noise_dir);
        l2_normalize(noise_dir);
        for (std::size_t i = 0; i < dim_; ++i)
            out[i] = static_cast<float>(signal_ * color_dir[i] + (1.0 - signal_) * noise_dir[i]);
    }

private:
    std::size_t dim_;
    std::uint64_t seed_;
    double signal_;
    std::string name_;
};

/// Batch text embedding: row i corresponds to texts[i], rows L2-normalized,
/// cached by (embedder_name, content hash) when a cache is given.
inline EmbeddingMatrix embed_texts(const TextEmbedder& e, const std::vector<std::string>& texts,
                                   const std::vector<std::string>& ids,
                                   EmbeddingCache* cache = nullptr) {
    if (texts.size() != ids.size()) throw DataError("embed_texts: ids/texts length mismatch");
    for (const std::string& t : texts)
        if (t.empty()) throw DataError("embed_texts: empty string input");
    EmbeddingMatrix m;
    m.rows = texts.size();
    m.dim = e.dimension();
    m.embedder_name = e.name();
    m.normalized = true;
    m.ids = ids;
    m.data.resize(m.rows * m.dim);
    std::vector<float> cached;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        auto out = m.row(i);
        std::string key = e.name() + ":" + content_fingerprint(texts[i]);
        if (cache && cache->lookup(key, cached) && cached.size() == m.dim) {
            std::copy(cached.begin(), cached.end(), out.begin());
            continue;
        }
        e.embed(texts[i], out);
        l2_normalize(out);
        if (cache) cache->insert(key, std::vector<float>(out.begin(), out.end()));
    }
    return m;
}

struct SkipRecord {
    std::string id;
    std::string reason;
};

/// Batch image embedding from files. Undecodable images are recorded as
/// skips and omitted from the matrix; an all-skip batch yields an empty
/// matrix (callers should warn).
inline EmbeddingMatrix embed_images(const ImageEmbedder& e, const std::vector<std::string>& ids,
                                    const std::vector<std::string>& paths,
                                    std::vector<SkipRecord>* skips = nullptr,
                                    EmbeddingCache* cache = nullptr) {
    if (ids.size() != paths.size()) throw DataError("embed_images: ids/paths length mismatch");
    if (e.space() != EmbedSpace::joint_text_image)
        throw DataError("embed_images: embedder must live in the joint text-image space");
    EmbeddingMatrix m;
    m.dim = e.dimension();
    m.embedder_name = e.name();
    m.normalized = true;
    std::vector<float> vec(m.dim), cached;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        Raster img;
        try {
            img = decode_image_file(paths[i]);
        } catch (const DecodeError& err) {
            if (skips) skips->push_back({ids[i], err.what()});
            continue;
        }
        std::string_view bytes(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
        std::string key = e.name() + ":" + content_fingerprint(bytes);
        if (cache && cache->lookup(key, cached) && cached.size() == m.dim) {
            vec = cached;
        } else {
            e.embed(img, vec);
            l2_normalize(vec);
            if (cache) cache->insert(key, vec);
        }
        m.ids.push_back(ids[i]);
        m.data.insert(m.data.end(), vec.begin(), vec.end());
        ++m.rows;
    }
    return m;
}

/// Row subset in the order of `ids`; every id must exist.
inline EmbeddingMatrix subset_rows(const EmbeddingMatrix& m, const std::vector<std::string>& ids) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < m.rows; ++i) index[m.ids[i]] = i;
    EmbeddingMatrix out;
    out.dim = m.dim;
    out.embedder_name = m.embedder_name;
    out.normalized = m.normalized;
    out.ids = ids;
    out.rows = ids.size();
    out.data.reserve(out.rows * out.dim);
    for (const std::string& id : ids) {
        auto it = index.find(id);
        if (it == index.end()) throw DataError("subset_rows: id " + id + " not in matrix");
        auto row = m.row(it->second);
        out.data.insert(out.data.end(), row.begin(), row.end());
    }
    return out;
}

/// Elementwise mean of two row-aligned normalized matrices. The result is
/// deliberately NOT re-normalized; downstream reduction works in cosine
/// geometry where the scale is irrelevant.
inline EmbeddingMatrix fuse_multimodal(const EmbeddingMatrix& text_m, const EmbeddingMatrix& image_m) {
    if (text_m.dim != image_m.dim)
        throw DataError("fuse_multimodal: dimension mismatch (" + std::to_string(text_m.dim) +
                        " vs " + std::to_string(image_m.dim) + ")");
    if (text_m.ids != image_m.ids)
        throw DataError("fuse_multimodal: id alignment mismatch");
    EmbeddingMatrix fused;
    fused.rows = text_m.rows;
    fused.dim = text_m.dim;
    fused.ids = text_m.ids;
    fused.embedder_name = "fused(" + text_m.embedder_name + "+" + image_m.embedder_name + ")";
    fused.normalized = false;
    fused.data.resize(fused.rows * fused.dim);
    std::vector<float> trow(fused.dim), irow(fused.dim);
    for (std::size_t i = 0; i < fused.rows; ++i) {
        auto t = text_m.row(i);
        auto im = image_m.row(i);
        std::copy(t.begin(), t.end(), trow.begin());
        std::copy(im.begin(), im.end(), irow.begin());
        if (!text_m.normalized) l2_normalize(trow);
        if (!image_m.normalized) l2_normalize(irow);
        auto out = fused.row(i);
        for (std::size_t j = 0; j < fused.dim; ++j) out[j] = 0.5f * (trow[j] + irow[j]);
    }
    return fused;
}

}  // namespace mmt

#endif

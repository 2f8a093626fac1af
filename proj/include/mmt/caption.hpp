#ifndef MMT_CAPTION_HPP
#define MMT_CAPTION_HPP

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "mmt/embedding.hpp"
#include "mmt/image.hpp"

namespace mmt {

class Captioner {
public:
    virtual ~Captioner() = default;
    virtual std::string name() const = 0;
    /// Non-empty caption for a decodable image; may use path_hint.
    virtual std::string caption(const Raster& image, const std::string& path_hint) const = 0;
};

/// Test stub: captions an image with its filename stem (cat.jpg -> "cat").
class FilenameStemCaptioner final : public Captioner {
public:
    std::string name() const override { return "stub-filename-stem"; }
    std::string caption(const Raster&, const std::string& path_hint) const override {
        return std::filesystem::path(path_hint).stem().string();
    }
};

/// Deterministic content captioner: describes the quantized dominant color
/// and brightness band. Near-flat rasters sharing a palette entry get the
/// same caption vocabulary, which gives image-only topics a usable textual
/// representation without a captioning model.
class PixelStatCaptioner final : public Captioner {
public:
    std::string name() const override { return "pixelstat"; }
    std::string caption(const Raster& img, const std::string&) const override {
        double mean[3] = {0, 0, 0};
        std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
        for (std::size_t i = 0; i < n; ++i) {
            for (int ch = 0; ch < 3; ++ch) {
                int c = img.channels == 3 ? ch : 0;
                mean[ch] += img.pixels[i * static_cast<std::size_t>(img.channels) +
                                       static_cast<std::size_t>(c)];
            }
        }
        int r = static_cast<int>(mean[0] / static_cast<double>(n) / 32.0);
        int g = static_cast<int>(mean[1] / static_cast<double>(n) / 32.0);
        int b = static_cast<int>(mean[2] / static_cast<double>(n) / 32.0);
        double luma = (0.299 * mean[0] + 0.587 * mean[1] + 0.114 * mean[2]) / static_cast<double>(n);
        const char* band = luma < 85 ? "dark" : (luma < 170 ? "mid" : "bright");
        char buf[96];
        std::snprintf(buf, sizeof(buf), "flat panel shade r%d g%d b%d %s tone", r, g, b, band);
        return buf;
    }
};

struct CaptionBatch {
    std::vector<std::string> captions;  // aligned with input; "" on failure
    std::vector<SkipRecord> skips;
};

/// One caption per image path; failures yield the "" sentinel plus a skip
/// record, never a crash.
inline CaptionBatch caption_images(const Captioner& c, const std::vector<std::string>& ids,
                                   const std::vector<std::string>& paths) {
    if (ids.size() != paths.size()) throw DataError("caption_images: ids/paths length mismatch");
    CaptionBatch out;
    out.captions.resize(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        try {
            Raster img = decode_image_file(paths[i]);
            std::string cap = c.caption(img, paths[i]);
            if (cap.empty()) throw DecodeError("captioner returned empty caption");
            out.captions[i] = cap;
        } catch (const std::exception& e) {
            out.captions[i] = "";
            out.skips.push_back({ids[i], e.what()});
        }
    }
    return out;
}

}  // namespace mmt

#endif

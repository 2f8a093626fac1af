#ifndef MMT_DHASH_HPP
#define MMT_DHASH_HPP

#include <bit>
#include <cstdint>
#include <string>

#include "mmt/hashutil.hpp"
#include "mmt/image.hpp"

namespace mmt {

/// 64-bit difference hash over horizontal brightness gradients.
struct ImageHash {
    std::uint64_t bits = 0;
    static constexpr const char* algorithm = "dhash-8x8";

    std::string hex() const { return hex64(bits); }
    bool operator==(const ImageHash&) const = default;
};

inline int hamming_distance(ImageHash a, ImageHash b) {
    return std::popcount(a.bits ^ b.bits);
}

/// Grayscale, bilinear resize to 9x8 (w x h), then bit(y,x) = 1 iff
/// pixel[x] > pixel[x+1] within the row. Row-major packing, MSB first:
/// bit (y,x) lands at position 63 - (y*8 + x).
inline ImageHash compute_dhash(const Raster& img) {
    if (img.width < 1 || img.height < 1) throw DecodeError("dhash: empty image");
    std::vector<float> gray = to_grayscale(img);
    std::vector<float> small = resize_bilinear(gray, img.width, img.height, 9, 8);
    std::uint64_t bits = 0;
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            bits <<= 1;
            if (small[static_cast<std::size_t>(y) * 9 + x] > small[static_cast<std::size_t>(y) * 9 + x + 1])
                bits |= 1;
        }
    }
    return ImageHash{bits};
}

inline ImageHash compute_dhash_file(const std::string& path) {
    return compute_dhash(decode_image_file(path));
}

}  // namespace mmt

#endif

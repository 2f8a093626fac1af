#ifndef MMT_IMAGE_HPP
#define MMT_IMAGE_HPP

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mmt/errors.hpp"

namespace mmt {

struct DecodeError : DataError {
    using DataError::DataError;
};

/// 8-bit raster, 1 (gray) or 3 (RGB) channels, row-major interleaved.
struct Raster {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int x, int y, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                       static_cast<std::size_t>(x)) * static_cast<std::size_t>(channels) +
                      static_cast<std::size_t>(c)];
    }
};

namespace detail {

inline int pnm_next_int(std::istream& in) {
    // Skips whitespace and '#' comments between header tokens.
    for (;;) {
        int c = in.peek();
        if (c == EOF) throw DecodeError("pnm: truncated header");
        if (std::isspace(c)) {
            in.get();
        } else if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else {
            break;
        }
    }
    int v;
    if (!(in >> v)) throw DecodeError("pnm: bad header value");
    return v;
}

}  // namespace detail

/// Decodes PGM/PPM (P2, P3, P5, P6). Anything else is a DecodeError.
inline Raster decode_image_bytes(const std::string& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P') throw DecodeError("image: unsupported format");
    char kind = bytes[1];
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
        throw DecodeError("image: unsupported PNM variant P" + std::string(1, kind));
    std::istringstream in(bytes);
    in.get();
    in.get();
    Raster img;
    img.width = detail::pnm_next_int(in);
    img.height = detail::pnm_next_int(in);
    int maxval = detail::pnm_next_int(in);
    img.channels = (kind == '3' || kind == '6') ? 3 : 1;
    if (img.width < 1 || img.height < 1 || maxval < 1 || maxval > 255)
        throw DecodeError("image: bad dimensions or maxval");
    if (static_cast<long long>(img.width) * img.height > 64LL * 1024 * 1024)
        throw DecodeError("image: implausibly large");
    std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height) *
                    static_cast<std::size_t>(img.channels);
    img.pixels.resize(n);
    if (kind == '5' || kind == '6') {
        in.get();  // single whitespace after maxval
        if (!in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(n)))
            throw DecodeError("image: truncated pixel data");
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            int v;
            if (!(in >> v) || v < 0 || v > maxval) throw DecodeError("image: bad ascii pixel");
            img.pixels[i] = static_cast<std::uint8_t>(v);
        }
    }
    if (maxval != 255) {
        for (auto& p : img.pixels)
            p = static_cast<std::uint8_t>((static_cast<int>(p) * 255 + maxval / 2) / maxval);
    }
    return img;
}

inline Raster decode_image_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DecodeError("image: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return decode_image_bytes(ss.str());
    } catch (const DecodeError& e) {
        throw DecodeError(std::string(e.what()) + " (" + path + ")");
    }
}

/// Writes binary PGM (1 channel) or PPM (3 channels).
inline void encode_image_file(const Raster& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("image: cannot write " + path);
    out << (img.channels == 3 ? "P6" : "P5") << "\n"
        << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw DataError("image: write failed for " + path);
}

/// BT.601 luma; matches the common PIL-style L conversion.
inline std::vector<float> to_grayscale(const Raster& img) {
    std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
    std::vector<float> gray(n);
    if (img.channels == 1) {
        for (std::size_t i = 0; i < n; ++i) gray[i] = static_cast<float>(img.pixels[i]);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            gray[i] = 0.299f * img.pixels[3 * i] + 0.587f * img.pixels[3 * i + 1] +
                      0.114f * img.pixels[3 * i + 2];
        }
    }
    return gray;
}

/// Bilinear resample of a single-channel float image.
inline std::vector<float> resize_bilinear(const std::vector<float>& src, int sw, int sh, int dw,
                                          int dh) {
    std::vector<float> dst(static_cast<std::size_t>(dw) * static_cast<std::size_t>(dh));
    double sx_scale = static_cast<double>(sw) / dw;
    double sy_scale = static_cast<double>(sh) / dh;
    for (int y = 0; y < dh; ++y) {
        double fy = (y + 0.5) * sy_scale - 0.5;
        if (fy < 0) fy = 0;
        if (fy > sh - 1) fy = sh - 1;
        int y0 = static_cast<int>(fy);
        int y1 = y0 + 1 < sh ? y0 + 1 : y0;
        double wy = fy - y0;
        for (int x = 0; x < dw; ++x) {
            double fx = (x + 0.5) * sx_scale - 0.5;
            if (fx < 0) fx = 0;
            if (fx > sw - 1) fx = sw - 1;
            int x0 = static_cast<int>(fx);
            int x1 = x0 + 1 < sw ? x0 + 1 : x0;
            double wx = fx - x0;
            double top = src[static_cast<std::size_t>(y0) * sw + x0] * (1 - wx) +
                         src[static_cast<std::size_t>(y0) * sw + x1] * wx;
            double bot = src[static_cast<std::size_t>(y1) * sw + x0] * (1 - wx) +
                         src[static_cast<std::size_t>(y1) * sw + x1] * wx;
            dst[static_cast<std::size_t>(y) * dw + x] = static_cast<float>(top * (1 - wy) + bot * wy);
        }
    }
    return dst;
}

}  // namespace mmt

#endif

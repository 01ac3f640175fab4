#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "shapeclust/common.hpp"
#include "shapeclust/image.hpp"

// Minimal PNG codec for the subset the ingest interface accepts: 8-bit
// grayscale and 24-bit RGB, non-interlaced. DEFLATE is delegated to zlib.

namespace shapeclust {

namespace detail {

inline std::uint32_t be32(const unsigned char* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

inline void put_be32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v >> 24));
    out.push_back(static_cast<unsigned char>(v >> 16));
    out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v));
}

inline int paeth_predictor(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a);
    const int pb = std::abs(p - b);
    const int pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    return pb <= pc ? b : c;
}

inline constexpr unsigned char kPngSignature[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};

inline void append_chunk(std::vector<unsigned char>& out, const char type[4],
                         const unsigned char* data, std::uint32_t len) {
    put_be32(out, len);
    const std::size_t type_at = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data, data + len);
    const auto crc = ::crc32(0L, out.data() + type_at, len + 4);
    put_be32(out, static_cast<std::uint32_t>(crc));
}

/// Assemble a PNG byte stream from an already-filtered raster
/// (height scanlines, each a filter byte plus width*channels samples).
inline std::vector<unsigned char> pack_png(const std::vector<unsigned char>& filtered, int width,
                                           int height, int channels) {
    unsigned char ihdr[13];
    ihdr[0] = static_cast<unsigned char>(width >> 24);
    ihdr[1] = static_cast<unsigned char>(width >> 16);
    ihdr[2] = static_cast<unsigned char>(width >> 8);
    ihdr[3] = static_cast<unsigned char>(width);
    ihdr[4] = static_cast<unsigned char>(height >> 24);
    ihdr[5] = static_cast<unsigned char>(height >> 16);
    ihdr[6] = static_cast<unsigned char>(height >> 8);
    ihdr[7] = static_cast<unsigned char>(height);
    ihdr[8] = 8;                                          // bit depth
    ihdr[9] = channels == 3 ? 2 : 0;                      // color type
    ihdr[10] = 0;                                         // compression
    ihdr[11] = 0;                                         // filter method
    ihdr[12] = 0;                                         // no interlace

    uLongf zlen = ::compressBound(static_cast<uLong>(filtered.size()));
    std::vector<unsigned char> zdata(zlen);
    if (::compress2(zdata.data(), &zlen, filtered.data(), static_cast<uLong>(filtered.size()),
                    Z_DEFAULT_COMPRESSION) != Z_OK)
        throw IoError("png: deflate failed");
    zdata.resize(zlen);

    std::vector<unsigned char> out(kPngSignature, kPngSignature + 8);
    append_chunk(out, "IHDR", ihdr, 13);
    append_chunk(out, "IDAT", zdata.data(), static_cast<std::uint32_t>(zdata.size()));
    append_chunk(out, "IEND", nullptr, 0);
    return out;
}

inline std::vector<unsigned char> slurp_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                     std::istreambuf_iterator<char>());
    return bytes;
}

} // namespace detail

/// Decode a PNG into grayscale intensities in [0,1]; RGB is converted with
/// luma weights 0.299/0.587/0.114. Throws DecodeError on anything outside the
/// supported subset or on corruption.
inline GrayImage decode_png_gray(const std::vector<unsigned char>& bytes) {
    using detail::be32;
    if (bytes.size() < 8 || !std::equal(detail::kPngSignature, detail::kPngSignature + 8,
                                        bytes.data()))
        throw DecodeError("png: bad signature");

    int width = 0, height = 0, color_type = -1;
    int channels = 0;
    bool seen_ihdr = false, seen_iend = false;
    std::vector<unsigned char> idat;

    std::size_t pos = 8;
    while (pos + 12 <= bytes.size() && !seen_iend) {
        const std::uint32_t len = be32(bytes.data() + pos);
        if (pos + 12 + len > bytes.size()) throw DecodeError("png: truncated chunk");
        const unsigned char* type = bytes.data() + pos + 4;
        const unsigned char* data = bytes.data() + pos + 8;
        const std::uint32_t crc_stored = be32(data + len);
        if (::crc32(0L, type, len + 4) != crc_stored) throw DecodeError("png: chunk crc mismatch");

        const std::string tname(reinterpret_cast<const char*>(type), 4);
        if (tname == "IHDR") {
            if (len != 13) throw DecodeError("png: bad IHDR");
            width = static_cast<int>(be32(data));
            height = static_cast<int>(be32(data + 4));
            const int bit_depth = data[8];
            color_type = data[9];
            if (width <= 0 || height <= 0 || width > 1 << 20 || height > 1 << 20 ||
                static_cast<std::int64_t>(width) * height > (1 << 28))
                throw DecodeError("png: unreasonable dimensions");
            if (bit_depth != 8) throw DecodeError("png: unsupported bit depth");
            if (color_type != 0 && color_type != 2)
                throw DecodeError("png: unsupported color type (need gray8 or rgb8)");
            if (data[10] != 0 || data[11] != 0) throw DecodeError("png: bad compression/filter");
            if (data[12] != 0) throw DecodeError("png: interlaced images unsupported");
            channels = color_type == 2 ? 3 : 1;
            seen_ihdr = true;
        } else if (tname == "IDAT") {
            if (!seen_ihdr) throw DecodeError("png: IDAT before IHDR");
            idat.insert(idat.end(), data, data + len);
        } else if (tname == "IEND") {
            seen_iend = true;
        }
        // ancillary chunks are skipped
        pos += 12 + len;
    }
    if (!seen_ihdr || !seen_iend || idat.empty()) throw DecodeError("png: missing chunks");

    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    std::vector<unsigned char> raster(static_cast<std::size_t>(height) * (stride + 1));
    {
        z_stream zs{};
        if (::inflateInit(&zs) != Z_OK) throw DecodeError("png: inflate init failed");
        zs.next_in = idat.data();
        zs.avail_in = static_cast<uInt>(idat.size());
        zs.next_out = raster.data();
        zs.avail_out = static_cast<uInt>(raster.size());
        const int rc = ::inflate(&zs, Z_FINISH);
        const bool ok = rc == Z_STREAM_END && zs.avail_out == 0;
        ::inflateEnd(&zs);
        if (!ok) throw DecodeError("png: raster size mismatch or corrupt stream");
    }

    // undo scanline filters in place
    const int bpp = channels;
    for (int y = 0; y < height; ++y) {
        unsigned char* line = raster.data() + static_cast<std::size_t>(y) * (stride + 1);
        const unsigned char filter = line[0];
        unsigned char* cur = line + 1;
        const unsigned char* prev =
            y > 0 ? raster.data() + static_cast<std::size_t>(y - 1) * (stride + 1) + 1 : nullptr;
        switch (filter) {
        case 0:
            break;
        case 1: // Sub
            for (std::size_t i = bpp; i < stride; ++i) cur[i] += cur[i - bpp];
            break;
        case 2: // Up
            if (prev)
                for (std::size_t i = 0; i < stride; ++i) cur[i] += prev[i];
            break;
        case 3: // Average
            for (std::size_t i = 0; i < stride; ++i) {
                const int a = i >= static_cast<std::size_t>(bpp) ? cur[i - bpp] : 0;
                const int b = prev ? prev[i] : 0;
                cur[i] += static_cast<unsigned char>((a + b) / 2);
            }
            break;
        case 4: // Paeth
            for (std::size_t i = 0; i < stride; ++i) {
                const int a = i >= static_cast<std::size_t>(bpp) ? cur[i - bpp] : 0;
                const int b = prev ? prev[i] : 0;
                const int c = prev && i >= static_cast<std::size_t>(bpp) ? prev[i - bpp] : 0;
                cur[i] += static_cast<unsigned char>(detail::paeth_predictor(a, b, c));
            }
            break;
        default:
            throw DecodeError("png: unknown scanline filter");
        }
    }

    GrayImage img(width, height);
    for (int y = 0; y < height; ++y) {
        const unsigned char* cur = raster.data() + static_cast<std::size_t>(y) * (stride + 1) + 1;
        for (int x = 0; x < width; ++x) {
            double v;
            if (channels == 1) {
                v = cur[x] / 255.0;
            } else {
                const unsigned char* px = cur + static_cast<std::size_t>(x) * 3;
                v = (0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]) / 255.0;
            }
            img.at(x, y) = v;
        }
    }
    return img;
}

inline GrayImage read_png_gray(const std::filesystem::path& path) {
    return decode_png_gray(detail::slurp_file(path));
}

/// Encode 8-bit samples (1 channel = gray, 3 = RGB) as a PNG with no scanline
/// filtering.
inline std::vector<unsigned char> encode_png(const unsigned char* samples, int width, int height,
                                             int channels) {
    if (width < 1 || height < 1 || (channels != 1 && channels != 3))
        throw DomainError("encode_png: bad dimensions");
    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    std::vector<unsigned char> filtered(static_cast<std::size_t>(height) * (stride + 1));
    for (int y = 0; y < height; ++y) {
        unsigned char* line = filtered.data() + static_cast<std::size_t>(y) * (stride + 1);
        line[0] = 0;
        std::copy_n(samples + static_cast<std::size_t>(y) * stride, stride, line + 1);
    }
    return detail::pack_png(filtered, width, height, channels);
}

inline void write_png_gray8(const std::filesystem::path& path, const unsigned char* samples,
                            int width, int height) {
    const auto bytes = encode_png(samples, width, height, 1);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError("short write to " + path.string());
}

} // namespace shapeclust

#pragma once

// 8-bit PNG read/write on top of libpng's simplified API.

#include <png.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hsaug/image.hpp"

namespace hsaug {

namespace detail {

struct PngImage {
    png_image img;
    PngImage() {
        std::memset(&img, 0, sizeof img);
        img.version = PNG_IMAGE_VERSION;
    }
    ~PngImage() { png_image_free(&img); }
    PngImage(const PngImage&) = delete;
    PngImage& operator=(const PngImage&) = delete;
};

inline std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace detail

/// Decodes to 1 channel for grey sources and 3 channels for colour sources.
/// Alpha, if present, is dropped by compositing onto black.
inline ImageBuffer decode_png(const std::vector<unsigned char>& bytes, const std::string& name = "<memory>") {
    detail::PngImage p;
    if (!png_image_begin_read_from_memory(&p.img, bytes.data(), bytes.size()))
        throw IoError("'" + name + "': " + p.img.message);
    const bool colour = (p.img.format & PNG_FORMAT_FLAG_COLOR) != 0;
    p.img.format = colour ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const int channels = colour ? 3 : 1;
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(p.img));
    png_color black{0, 0, 0};
    if (!png_image_finish_read(&p.img, &black, pixels.data(), 0, nullptr))
        throw IoError("'" + name + "': " + p.img.message);
    return ImageBuffer(static_cast<int>(p.img.width), static_cast<int>(p.img.height), channels, std::move(pixels));
}

inline std::vector<unsigned char> encode_png(const ImageBuffer& img) {
    detail::PngImage p;
    p.img.width = static_cast<png_uint_32>(img.width());
    p.img.height = static_cast<png_uint_32>(img.height());
    p.img.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&p.img, nullptr, &size, 0, img.data().data(), 0, nullptr))
        throw IoError(std::string("PNG encode: ") + p.img.message);
    std::vector<unsigned char> out(size);
    if (!png_image_write_to_memory(&p.img, out.data(), &size, 0, img.data().data(), 0, nullptr))
        throw IoError(std::string("PNG encode: ") + p.img.message);
    out.resize(size);
    return out;
}

inline ImageBuffer read_png(const std::filesystem::path& path) {
    return decode_png(detail::read_file_bytes(path), path.string());
}

/// Writes through a sibling temp file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const void* data, std::size_t size) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write '" + tmp.string() + "'");
        f.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!f) throw IoError("short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

inline void write_png(const std::filesystem::path& path, const ImageBuffer& img) {
    const auto bytes = encode_png(img);
    write_file_atomic(path, bytes.data(), bytes.size());
}

/// Masks are stored as single-channel PNGs whose values are class indices.
inline LabelMask read_mask_png(const std::filesystem::path& path) {
    auto img = read_png(path);
    if (img.channels() != 1) throw IoError("mask '" + path.string() + "' is not single-channel");
    for (auto v : img.data())
        if (v >= kNumClasses)
            throw IoError("mask '" + path.string() + "' contains value " + std::to_string(v) + " outside the palette");
    return LabelMask(img.width(), img.height(), std::vector<std::uint8_t>(img.data().begin(), img.data().end()));
}

inline void write_mask_png(const std::filesystem::path& path, const LabelMask& mask) {
    ImageBuffer img(mask.width(), mask.height(), 1,
                    std::vector<std::uint8_t>(mask.data().begin(), mask.data().end()));
    write_png(path, img);
}

}  // namespace hsaug

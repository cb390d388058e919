#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsaug {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input raster or record does not satisfy an operation's preconditions.
struct InvalidInput : Error {
    using Error::Error;
};

/// A tuning parameter is out of its legal range.
struct InvalidParameter : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

/// Round half away from zero, then clamp into the 8-bit range.
inline std::uint8_t quantize(double v) {
    const double r = std::round(v);
    if (r <= 0.0) return 0;
    if (r >= 255.0) return 255;
    return static_cast<std::uint8_t>(r);
}

/// Row-major, channel-interleaved 8-bit raster with 1 or 3 channels.
class ImageBuffer {
public:
    ImageBuffer() = default;

    ImageBuffer(int width, int height, int channels, std::uint8_t fill = 0)
        : width_(width), height_(height), channels_(channels) {
        check_dims(width, height, channels);
        pixels_.assign(static_cast<std::size_t>(width) * height * channels, fill);
    }

    ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> pixels)
        : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
        check_dims(width, height, channels);
        if (pixels_.size() != static_cast<std::size_t>(width) * height * channels)
            throw InvalidInput("ImageBuffer: pixel count does not match " + std::to_string(width) + "x" +
                               std::to_string(height) + "x" + std::to_string(channels));
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return pixels_.empty(); }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }

    std::uint8_t& at(int x, int y, int c = 0) { return pixels_[index(x, y, c)]; }
    std::uint8_t at(int x, int y, int c = 0) const { return pixels_[index(x, y, c)]; }

    std::span<std::uint8_t> row(int y) {
        return {pixels_.data() + static_cast<std::size_t>(y) * width_ * channels_,
                static_cast<std::size_t>(width_) * channels_};
    }
    std::span<const std::uint8_t> row(int y) const {
        return {pixels_.data() + static_cast<std::size_t>(y) * width_ * channels_,
                static_cast<std::size_t>(width_) * channels_};
    }

    std::span<std::uint8_t> data() noexcept { return pixels_; }
    std::span<const std::uint8_t> data() const noexcept { return pixels_; }
    const std::vector<std::uint8_t>& bytes() const noexcept { return pixels_; }

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

private:
    static void check_dims(int w, int h, int c) {
        if (w < 1 || h < 1) throw InvalidInput("ImageBuffer: dimensions must be >= 1");
        if (c != 1 && c != 3) throw InvalidInput("ImageBuffer: channels must be 1 or 3");
    }
    std::size_t index(int x, int y, int c) const noexcept {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// Class palette shared by masks, files and the evaluator.
enum class SegClass : std::uint8_t {
    Background = 0,
    Cytoplasm = 1,
    Nuclear = 2,
    RedBloodCell = 3,
    Fibroblast = 4,
};

inline constexpr int kNumClasses = 5;
inline constexpr std::uint8_t kBackground = 0;
inline constexpr std::uint8_t kCytoplasm = 1;

inline const char* class_name(int c) {
    static constexpr const char* names[kNumClasses] = {"background", "cytoplasm", "nuclear", "rbc", "fibroblast"};
    return (c >= 0 && c < kNumClasses) ? names[c] : "unknown";
}

/// Per-pixel class index raster, values in [0, kNumClasses).
class LabelMask {
public:
    LabelMask() = default;

    LabelMask(int width, int height, std::uint8_t fill = kBackground) : width_(width), height_(height) {
        if (width < 1 || height < 1) throw InvalidInput("LabelMask: dimensions must be >= 1");
        check_label(fill);
        labels_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    LabelMask(int width, int height, std::vector<std::uint8_t> labels)
        : width_(width), height_(height), labels_(std::move(labels)) {
        if (width < 1 || height < 1) throw InvalidInput("LabelMask: dimensions must be >= 1");
        if (labels_.size() != static_cast<std::size_t>(width) * height)
            throw InvalidInput("LabelMask: label count does not match dimensions");
        for (auto l : labels_) check_label(l);
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return labels_.empty(); }
    std::size_t pixel_count() const noexcept { return labels_.size(); }

    std::uint8_t& at(int x, int y) { return labels_[static_cast<std::size_t>(y) * width_ + x]; }
    std::uint8_t at(int x, int y) const { return labels_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<std::uint8_t> row(int y) {
        return {labels_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
    }
    std::span<const std::uint8_t> row(int y) const {
        return {labels_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
    }

    std::span<std::uint8_t> data() noexcept { return labels_; }
    std::span<const std::uint8_t> data() const noexcept { return labels_; }

    std::vector<std::size_t> histogram() const {
        std::vector<std::size_t> h(kNumClasses, 0);
        for (auto l : labels_) ++h[l];
        return h;
    }

    friend bool operator==(const LabelMask&, const LabelMask&) = default;

private:
    static void check_label(std::uint8_t l) {
        if (l >= kNumClasses) throw InvalidInput("LabelMask: label " + std::to_string(l) + " out of palette");
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> labels_;
};

template <typename A, typename B>
bool same_dims(const A& a, const B& b) {
    return a.width() == b.width() && a.height() == b.height();
}

}  // namespace hsaug

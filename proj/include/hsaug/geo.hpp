#pragma once

// Geometric augmentations applied jointly to an image and its mask. Images
// are resampled bilinearly, masks nearest-neighbour, both through the same
// source-coordinate mapping so labels always follow the pixels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsaug/image.hpp"
#include "hsaug/rng.hpp"

namespace hsaug {

struct Sample {
    ImageBuffer image;
    LabelMask mask;
    int type_label = 1;
    std::string source_id;

    void validate() const {
        if (!same_dims(image, mask))
            throw InvalidInput("sample '" + source_id + "': image and mask dimensions differ");
    }
};

enum class TransformKind { Crop, HFlip, VFlip, HVFlip, Translate };

inline std::string_view to_string(TransformKind k) {
    switch (k) {
        case TransformKind::Crop: return "crop";
        case TransformKind::HFlip: return "hflip";
        case TransformKind::VFlip: return "vflip";
        case TransformKind::HVFlip: return "hvflip";
        case TransformKind::Translate: return "translate";
    }
    return "unknown";
}

inline std::optional<TransformKind> parse_transform_kind(std::string_view s) {
    for (auto k : {TransformKind::Crop, TransformKind::HFlip, TransformKind::VFlip, TransformKind::HVFlip,
                   TransformKind::Translate})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    friend bool operator==(const Rect&, const Rect&) = default;
};

struct TransformRecord {
    TransformKind kind = TransformKind::HFlip;
    Rect rect;   // Crop only
    int dx = 0;  // Translate only
    int dy = 0;

    friend bool operator==(const TransformRecord&, const TransformRecord&) = default;
};

struct GeoParams {
    int cw = 800;
    int ch = 700;
    std::vector<TransformKind> transforms = {TransformKind::Crop, TransformKind::HFlip, TransformKind::Translate,
                                             TransformKind::VFlip, TransformKind::HVFlip};
    int target_width = 640;
    int target_height = 480;
    double translate_fraction = 0.1;

    void validate() const {
        if (cw < 1 || ch < 1) throw InvalidParameter("geo params: cw and ch must be >= 1");
        if (target_width < 1 || target_height < 1) throw InvalidParameter("geo params: target dims must be >= 1");
        if (!(translate_fraction >= 0.0 && translate_fraction < 1.0))
            throw InvalidParameter("geo params: translate_fraction must be in [0,1)");
    }
};

enum class FlipAxis { Horizontal, Vertical, Both };

namespace detail {

template <typename Raster>
Raster flip_raster(const Raster& src, bool mirror_x, bool mirror_y) {
    Raster out = src;
    const int w = src.width();
    const int h = src.height();
    const int c = [&] {
        if constexpr (requires { src.channels(); }) return src.channels();
        else return 1;
    }();
    for (int y = 0; y < h; ++y) {
        auto in = src.row(mirror_y ? h - 1 - y : y);
        auto dst = out.row(y);
        for (int x = 0; x < w; ++x) {
            const int sx = mirror_x ? w - 1 - x : x;
            for (int k = 0; k < c; ++k) dst[x * c + k] = in[sx * c + k];
        }
    }
    return out;
}

template <typename Raster>
Raster shift_raster(const Raster& src, int dx, int dy, std::uint8_t fill) {
    Raster out = src;
    std::fill(out.data().begin(), out.data().end(), fill);
    const int w = src.width();
    const int h = src.height();
    const int c = [&] {
        if constexpr (requires { src.channels(); }) return src.channels();
        else return 1;
    }();
    for (int y = 0; y < h; ++y) {
        const int sy = y - dy;
        if (sy < 0 || sy >= h) continue;
        auto in = src.row(sy);
        auto dst = out.row(y);
        for (int x = 0; x < w; ++x) {
            const int sx = x - dx;
            if (sx < 0 || sx >= w) continue;
            for (int k = 0; k < c; ++k) dst[x * c + k] = in[sx * c + k];
        }
    }
    return out;
}

}  // namespace detail

/// Continuous source coordinate (pixel-centre aligned) of destination index
/// `dst` when `src_len` samples are stretched onto `dst_len`.
inline double source_position(int dst, int src_len, int dst_len) {
    return (static_cast<double>(2 * dst + 1) * src_len - dst_len) / (2.0 * dst_len);
}

/// Source index nearest to `source_position(dst, ...)`.
inline int nearest_source_index(int dst, int src_len, int dst_len) {
    const std::int64_t idx = (static_cast<std::int64_t>(2 * dst + 1) * src_len) / (2 * static_cast<std::int64_t>(dst_len));
    return static_cast<int>(std::min<std::int64_t>(idx, src_len - 1));
}

/// Bilinear resample of the region `rect` of `src` to w x h.
inline ImageBuffer resample_bilinear(const ImageBuffer& src, const Rect& rect, int w, int h) {
    ImageBuffer out(w, h, src.channels());
    const int c = src.channels();
    std::vector<int> x0(w), x1(w);
    std::vector<double> fx(w);
    for (int x = 0; x < w; ++x) {
        const double p = std::clamp(source_position(x, rect.w, w), 0.0, static_cast<double>(rect.w - 1));
        x0[x] = static_cast<int>(std::floor(p));
        x1[x] = std::min(x0[x] + 1, rect.w - 1);
        fx[x] = p - x0[x];
    }
    for (int y = 0; y < h; ++y) {
        const double py = std::clamp(source_position(y, rect.h, h), 0.0, static_cast<double>(rect.h - 1));
        const int y0 = static_cast<int>(std::floor(py));
        const int y1 = std::min(y0 + 1, rect.h - 1);
        const double fy = py - y0;
        auto r0 = src.row(rect.y + y0);
        auto r1 = src.row(rect.y + y1);
        auto dst = out.row(y);
        for (int x = 0; x < w; ++x) {
            const int a = (rect.x + x0[x]) * c;
            const int b = (rect.x + x1[x]) * c;
            for (int k = 0; k < c; ++k) {
                const double top = r0[a + k] + (r0[b + k] - r0[a + k]) * fx[x];
                const double bot = r1[a + k] + (r1[b + k] - r1[a + k]) * fx[x];
                dst[x * c + k] = quantize(top + (bot - top) * fy);
            }
        }
    }
    return out;
}

inline LabelMask resample_nearest(const LabelMask& src, const Rect& rect, int w, int h) {
    LabelMask out(w, h);
    std::vector<int> sx(w);
    for (int x = 0; x < w; ++x) sx[x] = rect.x + nearest_source_index(x, rect.w, w);
    for (int y = 0; y < h; ++y) {
        auto in = src.row(rect.y + nearest_source_index(y, rect.h, h));
        auto dst = out.row(y);
        for (int x = 0; x < w; ++x) dst[x] = in[sx[x]];
    }
    return out;
}

inline Sample flip(const Sample& s, FlipAxis axis) {
    s.validate();
    const bool mx = axis != FlipAxis::Vertical;
    const bool my = axis != FlipAxis::Horizontal;
    return {detail::flip_raster(s.image, mx, my), detail::flip_raster(s.mask, mx, my), s.type_label, s.source_id};
}

inline Rect sample_crop_rect(const GeoParams& params, int width, int height, Rng& rng) {
    if (width < 1 || height < 1) throw InvalidInput("sample_crop_rect: dimensions must be >= 1");
    const int max_w = std::min(params.cw, width);
    const int max_h = std::min(params.ch, height);
    Rect r;
    r.w = static_cast<int>(rng.uniform_int((max_w + 1) / 2, max_w));
    r.h = static_cast<int>(rng.uniform_int((max_h + 1) / 2, max_h));
    r.x = static_cast<int>(rng.uniform_int(0, width - r.w));
    r.y = static_cast<int>(rng.uniform_int(0, height - r.h));
    return r;
}

/// Crop to `rect`, then resize to target_width x target_height.
inline Sample crop(const Sample& s, const Rect& rect, int target_width, int target_height) {
    s.validate();
    if (rect.w < 1 || rect.h < 1 || rect.x < 0 || rect.y < 0 || rect.x + rect.w > s.image.width() ||
        rect.y + rect.h > s.image.height())
        throw InvalidInput("crop: rectangle (" + std::to_string(rect.x) + "," + std::to_string(rect.y) + "," +
                           std::to_string(rect.w) + "," + std::to_string(rect.h) + ") outside source bounds");
    if (target_width < 1 || target_height < 1) throw InvalidParameter("crop: target dims must be >= 1");
    return {resample_bilinear(s.image, rect, target_width, target_height),
            resample_nearest(s.mask, rect, target_width, target_height), s.type_label, s.source_id};
}

/// Whole-frame resize; a no-op copy when the sample already has target dims.
inline Sample fit_to_target(const Sample& s, int target_width, int target_height) {
    if (s.image.width() == target_width && s.image.height() == target_height) return s;
    return crop(s, Rect{0, 0, s.image.width(), s.image.height()}, target_width, target_height);
}

/// Vacated image pixels become 0, vacated mask pixels background.
inline Sample translate(const Sample& s, int dx, int dy) {
    s.validate();
    if (std::abs(dx) >= s.image.width() || std::abs(dy) >= s.image.height())
        throw InvalidInput("translate: offset (" + std::to_string(dx) + "," + std::to_string(dy) +
                           ") exceeds image dimensions");
    return {detail::shift_raster(s.image, dx, dy, 0), detail::shift_raster(s.mask, dx, dy, kBackground),
            s.type_label, s.source_id};
}

inline TransformRecord sample_transform(TransformKind kind, const GeoParams& params, int width, int height,
                                        Rng& rng) {
    TransformRecord rec;
    rec.kind = kind;
    if (kind == TransformKind::Crop) {
        rec.rect = sample_crop_rect(params, width, height, rng);
    } else if (kind == TransformKind::Translate) {
        const int max_dx = static_cast<int>(std::floor(params.translate_fraction * width));
        const int max_dy = static_cast<int>(std::floor(params.translate_fraction * height));
        rec.dx = static_cast<int>(rng.uniform_int(-max_dx, max_dx));
        rec.dy = static_cast<int>(rng.uniform_int(-max_dy, max_dy));
    }
    return rec;
}

/// Replays a stored record. Crop output has the target dims; the other kinds
/// keep the source dims (use fit_to_target for the full geo stage).
inline Sample apply_transform(const Sample& s, const TransformRecord& rec, int target_width, int target_height) {
    switch (rec.kind) {
        case TransformKind::Crop: return crop(s, rec.rect, target_width, target_height);
        case TransformKind::HFlip: return flip(s, FlipAxis::Horizontal);
        case TransformKind::VFlip: return flip(s, FlipAxis::Vertical);
        case TransformKind::HVFlip: return flip(s, FlipAxis::Both);
        case TransformKind::Translate: return translate(s, rec.dx, rec.dy);
    }
    throw InvalidInput("apply_transform: unknown transform kind");
}

}  // namespace hsaug

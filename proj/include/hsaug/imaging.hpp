#pragma once

// Colour and brightness transforms that turn a CMOS RGB capture into a clean
// single-band pseudo-spectral image. Every stage quantizes to 8 bits at its
// output using round-half-away-from-zero.

#include <array>
#include <cmath>

#include "hsaug/image.hpp"

namespace hsaug {

struct SpectralParams {
    double gamma = 0.3;
    int c1 = 100;

    void validate() const {
        if (!(gamma > 0.0)) throw InvalidParameter("gamma must be > 0");
        if (c1 < 0 || c1 > 255) throw InvalidParameter("c1 must be in [0,255]");
    }
};

namespace detail {

inline void require_gray(const ImageBuffer& img, const char* op) {
    if (img.channels() != 1) throw InvalidInput(std::string(op) + ": expected a 1-channel image");
}

template <typename Lut>
ImageBuffer apply_lut(const ImageBuffer& img, const Lut& lut) {
    ImageBuffer out = img;
    for (auto& v : out.data()) v = lut[v];
    return out;
}

}  // namespace detail

/// BT.601 luma.
inline ImageBuffer to_grayscale(const ImageBuffer& rgb) {
    if (rgb.channels() != 3) throw InvalidInput("to_grayscale: expected a 3-channel image");
    ImageBuffer out(rgb.width(), rgb.height(), 1);
    auto src = rgb.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const double y = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
        dst[i] = quantize(y);
    }
    return out;
}

/// v -> 255 * (v/255)^(1/gamma). gamma < 1 darkens.
inline ImageBuffer gamma_correct(const ImageBuffer& img, double gamma) {
    detail::require_gray(img, "gamma_correct");
    if (!(gamma > 0.0)) throw InvalidParameter("gamma_correct: gamma must be > 0");
    std::array<std::uint8_t, 256> lut{};
    const double exponent = 1.0 / gamma;
    for (int v = 0; v < 256; ++v) lut[v] = quantize(255.0 * std::pow(v / 255.0, exponent));
    return detail::apply_lut(img, lut);
}

/// Global CDF equalization. A constant image is returned unchanged.
inline ImageBuffer equalize_histogram(const ImageBuffer& img) {
    detail::require_gray(img, "equalize_histogram");
    std::array<std::size_t, 256> cdf{};
    for (auto v : img.data()) ++cdf[v];
    for (int v = 1; v < 256; ++v) cdf[v] += cdf[v - 1];

    const std::size_t total = img.pixel_count();
    std::size_t cdf_min = 0;
    for (auto c : cdf) {
        if (c != 0) {
            cdf_min = c;
            break;
        }
    }
    if (cdf_min == total) return img;

    std::array<std::uint8_t, 256> lut{};
    const double denom = static_cast<double>(total - cdf_min);
    for (int v = 0; v < 256; ++v) {
        // Values below the first occupied bin never occur; they map to 0.
        const double num = cdf[v] > cdf_min ? static_cast<double>(cdf[v] - cdf_min) : 0.0;
        lut[v] = quantize(num / denom * 255.0);
    }
    return detail::apply_lut(img, lut);
}

inline ImageBuffer add_constant_saturating(const ImageBuffer& img, int c) {
    detail::require_gray(img, "add_constant_saturating");
    if (c < 0 || c > 255) throw InvalidParameter("add_constant_saturating: constant must be in [0,255]");
    std::array<std::uint8_t, 256> lut{};
    for (int v = 0; v < 256; ++v) lut[v] = static_cast<std::uint8_t>(std::min(v + c, 255));
    return detail::apply_lut(img, lut);
}

/// grayscale -> gamma -> equalize -> +c1, in that order.
inline ImageBuffer spectralize(const ImageBuffer& rgb, const SpectralParams& params) {
    params.validate();
    auto gray = to_grayscale(rgb);
    auto corrected = gamma_correct(gray, params.gamma);
    auto equalized = equalize_histogram(corrected);
    return add_constant_saturating(equalized, params.c1);
}

}  // namespace hsaug
